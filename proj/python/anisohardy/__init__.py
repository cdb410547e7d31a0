"""Expansive-matrix dilation geometry, variable-exponent norms, and the
Fourier-side verification scans, backed by the C++ core."""

from ._core import (
    AnisoError,
    Atom,
    AtomicDecomposition,
    Ball,
    Dilation,
    Exponent,
    GridSpec,
    SampledFunction,
    ScanGrid,
    atomic_norm_expression,
    coefficient_sum_check,
    comparability_band,
    convolve,
    cover_ball,
    default_bump,
    dft_alias_risk,
    dft_at,
    dilate_samples,
    hardy_littlewood_integral,
    hardy_norm_proxy,
    indicator_norm,
    lemma31_scan,
    lemma32_scan,
    luxemburg_norm,
    make_atom,
    make_scan_grid,
    min_moment_order,
    modular,
    origin_limit_scan,
    radial_maximal,
    rasterize_ball,
    run_config,
    run_config_file,
    spectrum,
    synthesize,
    theorem31_scan,
    validate_atom,
    __version__,
)

__all__ = [
    "AnisoError",
    "Atom",
    "AtomicDecomposition",
    "Ball",
    "Dilation",
    "Exponent",
    "GridSpec",
    "SampledFunction",
    "ScanGrid",
    "atomic_norm_expression",
    "coefficient_sum_check",
    "comparability_band",
    "convolve",
    "cover_ball",
    "default_bump",
    "dft_alias_risk",
    "dft_at",
    "dilate_samples",
    "hardy_littlewood_integral",
    "hardy_norm_proxy",
    "indicator_norm",
    "lemma31_scan",
    "lemma32_scan",
    "luxemburg_norm",
    "make_atom",
    "make_scan_grid",
    "min_moment_order",
    "modular",
    "origin_limit_scan",
    "radial_maximal",
    "rasterize_ball",
    "run_config",
    "run_config_file",
    "spectrum",
    "synthesize",
    "theorem31_scan",
    "validate_atom",
    "__version__",
]
