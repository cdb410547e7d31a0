#include "aniso/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <json.hpp>

#include "aniso/analysis.hpp"
#include "aniso/atoms.hpp"
#include "aniso/errors.hpp"
#include "aniso/report.hpp"

namespace aniso {

namespace fs = std::filesystem;

namespace {

struct RunContext {
  RunConfig cfg;
  DilationPtr dil;
  std::optional<ExponentFunction> exponent;
  std::optional<Atom> primary_atom;            // on its own ball-fitted grid
  std::optional<GridSpec> shared_grid;         // covers the decomposition balls
  std::optional<AtomicDecomposition> decomp;   // r = 2 atoms on the shared grid
};

ExponentFunction build_exponent(const RunConfig& cfg, const DilationPtr& dil) {
  const auto& e = cfg.exponent;
  if (e.family == "constant") return ExponentFunction::constant(e.p0);
  if (e.family == "log_perturbed") {
    return ExponentFunction::log_perturbed(e.p_inf, e.amplitude, dil);
  }
  if (e.family == "piecewise_test") {
    std::vector<ExponentFunction::Piece> pieces;
    for (const auto& pp : e.pieces) {
      if (static_cast<int>(pp.lo.size()) != cfg.dimension ||
          static_cast<int>(pp.hi.size()) != cfg.dimension) {
        throw Error(ErrorCode::kConfigError, "piece box size does not match dimension");
      }
      ExponentFunction::Piece piece;
      piece.lo = Eigen::Map<const Vector>(pp.lo.data(), cfg.dimension);
      piece.hi = Eigen::Map<const Vector>(pp.hi.data(), cfg.dimension);
      piece.value = pp.value;
      pieces.push_back(std::move(piece));
    }
    return ExponentFunction::piecewise_test(std::move(pieces), e.background);
  }
  throw Error(ErrorCode::kConfigError, "unknown exponent family: " + e.family);
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<int>(v.size()));
}

Ball primary_ball(const RunConfig& cfg) {
  return Ball{to_vector(cfg.atom.x0), cfg.atom.k0};
}

const Atom& ensure_primary_atom(RunContext& ctx) {
  if (!ctx.primary_atom) {
    const Ball ball = primary_ball(ctx.cfg);
    const GridSpec grid =
        cover_ball(*ctx.dil, ball, ctx.cfg.grid.box_padding, ctx.cfg.effective_resolution());
    AtomRecipe recipe{ball, ctx.cfg.atom.r, ctx.cfg.atom.s.value_or(-1), ctx.cfg.atom.seed};
    ctx.primary_atom = make_atom(*ctx.dil, *ctx.exponent, recipe, grid);
  }
  return *ctx.primary_atom;
}

AtomicDecomposition build_decomposition(const DilationStructure& d, const ExponentFunction& p,
                                        const RunConfig::DecompositionSpec& spec,
                                        std::optional<int> s_order, double padding,
                                        int resolution, GridSpec* grid_out) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> kdist(spec.ball_k_min, spec.ball_k_max);
  std::uniform_real_distribution<double> cdist(-spec.center_spread, spec.center_spread);
  std::uniform_real_distribution<double> mag_dist(std::log10(spec.coeff_lo),
                                                  std::log10(spec.coeff_hi));
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * M_PI);

  std::vector<Ball> balls;
  std::vector<Complex> coeffs;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < spec.count; ++i) {
    Ball ball;
    ball.scale = kdist(rng);
    ball.center = Vector(d.dimension());
    for (int dd = 0; dd < d.dimension(); ++dd) ball.center(dd) = cdist(rng);
    const double mag = std::pow(10.0, mag_dist(rng));
    const double phase = phase_dist(rng);
    balls.push_back(std::move(ball));
    coeffs.push_back(mag * Complex(std::cos(phase), std::sin(phase)));
    seeds.push_back(spec.seed * 1000003ULL + static_cast<std::uint64_t>(i) + 1);
  }

  double reach = 0.0;
  for (const Ball& ball : balls) {
    const Vector half = d.ball_bounding_box(ball.scale);
    for (int dd = 0; dd < d.dimension(); ++dd) {
      reach = std::max(reach, std::abs(ball.center(dd)) + half(dd));
    }
  }
  GridSpec grid;
  grid.dimension = d.dimension();
  grid.half_width = reach * padding;
  grid.resolution = resolution;

  AtomicDecomposition decomp;
  decomp.coefficients = std::move(coeffs);
  for (size_t i = 0; i < balls.size(); ++i) {
    AtomRecipe recipe{balls[i], 2.0, s_order.value_or(-1), seeds[i]};
    decomp.atoms.push_back(make_atom(d, p, recipe, grid));
  }
  if (grid_out) *grid_out = grid;
  return decomp;
}

const AtomicDecomposition& ensure_decomposition(RunContext& ctx) {
  if (!ctx.decomp) {
    GridSpec grid;
    ctx.decomp = build_decomposition(*ctx.dil, *ctx.exponent, ctx.cfg.decomposition,
                                     ctx.cfg.atom.s, ctx.cfg.grid.box_padding,
                                     ctx.cfg.effective_resolution(), &grid);
    ctx.shared_grid = grid;
  }
  return *ctx.decomp;
}

double value_at(const SampledFunction& f, const Vector& x) {
  const GridSpec& g = f.grid();
  std::array<int, 3> idx{};
  for (int d = 0; d < g.dimension; ++d) {
    const double u = (x(d) + g.half_width) / g.spacing() - 0.5;
    idx[d] = std::clamp(static_cast<int>(std::lround(u)), 0, g.resolution - 1);
  }
  std::int64_t flat = 0;
  for (int d = 0; d < g.dimension; ++d) flat = flat * g.resolution + idx[d];
  return std::abs(f.values()[static_cast<size_t>(flat)]);
}

// ---------------------------------------------------------------------------
// dilation check

VerificationReport check_dilation(RunContext& ctx) {
  const DilationStructure& d = *ctx.dil;
  VerificationReport rep;
  rep.summary.check = "dilation";
  const std::string params = "n=" + std::to_string(d.dimension());

  append_row(rep, params, "expansive", d.eig_min(), 1.0, d.eig_min() > 1.0);
  append_row(rep, params, "expansion_factor", d.expansion_factor(), 1.0,
             d.expansion_factor() > 1.0);
  {
    const double r = d.expansion_factor();
    const bool tau_ok = std::pow(r, d.tau()) >= 2.0 * (1.0 - 1e-12) &&
                        (d.tau() <= 0 || std::pow(r, d.tau() - 1) < 2.0 * (1.0 + 1e-12));
    append_row(rep, params, "tau", d.tau(), 0.0, tau_ok);
  }

  // stratified Monte-Carlo volume of Delta against the binomial 3-sigma band
  {
    const int n = d.dimension();
    const Vector half = d.ball_bounding_box(0);
    double box_vol = 1.0;
    for (int k = 0; k < n; ++k) box_vol *= 2.0 * half(k);
    const long total = 1000000;
    const long per_axis = n == 1 ? total : (n == 2 ? 1000 : 100);
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    long hits = 0;
    long cells = 1;
    for (int k = 0; k < n; ++k) cells *= per_axis;
    Vector x(n);
    std::array<long, 3> idx{};
    for (long c = 0; c < cells; ++c) {
      long rest = c;
      for (int k = n - 1; k >= 0; --k) {
        idx[static_cast<size_t>(k)] = rest % per_axis;
        rest /= per_axis;
      }
      for (int k = 0; k < n; ++k) {
        const double cell = 2.0 * half(k) / per_axis;
        x(k) = -half(k) + (idx[static_cast<size_t>(k)] + jitter(rng)) * cell;
      }
      if (d.in_ball(x, 0)) ++hits;
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(cells);
    const double est = frac * box_vol;
    const double sigma = box_vol * std::sqrt(frac * (1.0 - frac) / static_cast<double>(cells));
    append_row(rep, params, "volume_mc", std::abs(est - 1.0), 3.0 * sigma,
               std::abs(est - 1.0) <= 3.0 * sigma);
  }

  // exact homogeneity of the shell index over k in {-4..4}
  {
    std::mt19937_64 rng(0xd11a70ULL);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const Vector half = d.ball_bounding_box(3);
    long failures = 0;
    const long points = 1000;
    Vector x(d.dimension());
    for (long i = 0; i < points; ++i) {
      for (int k = 0; k < d.dimension(); ++k) x(k) = uni(rng) * half(k);
      if (x.isZero(0.0)) continue;
      const int base = d.shell_index(x);
      for (int k = -4; k <= 4; ++k) {
        const Vector y = d.apply_power(x, k);
        if (d.shell_index(y) != base + k) ++failures;
        if (d.quasi_norm(y) != power_int(d.det_factor(), base + k)) ++failures;
      }
    }
    append_row(rep, params, "homogeneity_exact", static_cast<double>(failures), 0.0,
               failures == 0);
  }

  // quasi-triangle constant, stable under doubling the sample
  {
    std::mt19937_64 rng(0x7a5cULL);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const Vector half = d.ball_bounding_box(2);
    auto draw = [&] {
      Vector x(d.dimension());
      for (int k = 0; k < d.dimension(); ++k) x(k) = uni(rng) * half(k);
      return x;
    };
    double c_half = 0.0, c_full = 0.0;
    const long pairs = 10000;
    for (long i = 0; i < pairs; ++i) {
      const Vector x = draw(), y = draw();
      const double rx = d.quasi_norm(x), ry = d.quasi_norm(y);
      if (rx + ry == 0.0) continue;
      const double c = d.quasi_norm(x + y) / (rx + ry);
      c_full = std::max(c_full, c);
      if (i < pairs / 2) c_half = std::max(c_half, c);
    }
    append_row(rep, params, "quasi_triangle_stable", c_full / c_half, 1.1,
               c_full <= 1.1 * c_half);
    rep.summary.metrics["quasi_triangle_c"] = c_full;
  }

  // nesting B_i in r B_i in B_{i+1} on boundary-adjacent points
  {
    const std::vector<Vector> dirs = scan_directions(d.dimension(), 60);
    long failures = 0;
    long tested = 0;
    for (int i = -2; i <= 2; ++i) {
      for (const Vector& u : dirs) {
        const double t = d.boundary_radius(u, i);
        const Vector x = (1.0 - 1e-6) * t * u;  // just inside B_i
        if (!d.in_ball(x, i)) continue;
        ++tested;
        const Vector rx = d.expansion_factor() * x;
        if (!d.in_ball(x / d.expansion_factor(), i)) ++failures;  // B_i in r B_i
        if (!d.in_ball(rx, i + 1)) ++failures;                    // r B_i in B_{i+1}
      }
    }
    append_row(rep, params, "nesting", static_cast<double>(failures),
               static_cast<double>(tested), failures == 0 && tested > 0);
  }

  // adjoint: same b, same eigenvalue bounds, same homogeneity
  {
    const DilationPtr adj = d.adjoint();
    append_row(rep, params, "adjoint_b", std::abs(adj->det_factor() - d.det_factor()), 1e-12,
               std::abs(adj->det_factor() - d.det_factor()) <= 1e-12);
    const double eig_gap = std::max(std::abs(adj->eig_min() - d.eig_min()),
                                    std::abs(adj->eig_max() - d.eig_max()));
    append_row(rep, params, "adjoint_eigs", eig_gap, 1e-9, eig_gap <= 1e-9);
    std::mt19937_64 rng(0xad70ULL);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const Vector half = adj->ball_bounding_box(2);
    long failures = 0;
    Vector x(d.dimension());
    for (long i = 0; i < 200; ++i) {
      for (int k = 0; k < d.dimension(); ++k) x(k) = uni(rng) * half(k);
      if (x.isZero(0.0)) continue;
      const int base = adj->shell_index(x);
      for (int k = -3; k <= 3; ++k) {
        if (adj->shell_index(adj->apply_power(x, k)) != base + k) ++failures;
      }
    }
    append_row(rep, params, "adjoint_homogeneity", static_cast<double>(failures), 0.0,
               failures == 0);
  }

  // comparability band extremes finite and positive in both regimes
  {
    std::mt19937_64 rng(0xba4dULL);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const Vector half = d.ball_bounding_box(3);
    std::vector<Vector> samples;
    Vector x(d.dimension());
    for (long i = 0; i < 2000; ++i) {
      for (int k = 0; k < d.dimension(); ++k) x(k) = uni(rng) * half(k);
      if (!x.isZero(0.0)) samples.push_back(x);
    }
    const ComparabilityBand band = comparability_band(d, samples);
    const bool ok = band.small_rho.c_low > 0.0 && std::isfinite(band.small_rho.c_high) &&
                    band.large_rho.c_low > 0.0 && std::isfinite(band.large_rho.c_high);
    append_row(rep, params, "comparability_finite", band.large_rho.c_high,
               band.large_rho.c_low, ok);
    rep.summary.metrics["band_large_spread"] = band.large_rho.c_high / band.large_rho.c_low;
  }

  rep.summary.sup_ratio = rep.summary.metrics["quasi_triangle_c"];
  return rep;
}

// ---------------------------------------------------------------------------
// varexp check

VerificationReport check_varexp(RunContext& ctx) {
  VerificationReport rep;
  rep.summary.check = "varexp";
  const std::string params = "family=" + ctx.cfg.exponent.family;

  // closed-form oracles run on a private 1-d fixture with aligned grids
  Matrix two(1, 1);
  two << 2.0;
  const DilationPtr line = DilationStructure::make(two);
  GridSpec fixture;
  fixture.dimension = 1;
  fixture.half_width = 4.0;
  fixture.resolution = 2048;  // h = 1/256, ball and step edges land on cell edges

  {
    std::mt19937_64 rng(0x57e9ULL);
    std::uniform_real_distribution<double> val(0.2, 5.0);
    std::uniform_real_distribution<double> pd(0.3, 1.0);
    std::uniform_int_distribution<int> cut(-20, 20);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const double p0 = pd(rng);
      int a = cut(rng), b = cut(rng), c = cut(rng);
      std::array<int, 3> edges{a, b, c};
      std::sort(edges.begin(), edges.end());
      if (edges[0] == edges[1]) --edges[0];
      if (edges[1] == edges[2]) ++edges[2];
      const double v1 = val(rng), v2 = val(rng);
      auto step = [&](const Vector& x) {
        const double t = x(0) * 8.0;
        if (t >= edges[0] && t < edges[1]) return v1;
        if (t >= edges[1] && t < edges[2]) return v2;
        return 0.0;
      };
      const SampledFunction f = SampledFunction::sample(fixture, step);
      const double w1 = (edges[1] - edges[0]) / 8.0;
      const double w2 = (edges[2] - edges[1]) / 8.0;
      const double closed =
          std::pow(std::pow(v1, p0) * w1 + std::pow(v2, p0) * w2, 1.0 / p0);
      const double measured = luxemburg_norm(ExponentFunction::constant(p0), f);
      worst = std::max(worst, std::abs(measured - closed) / closed);
    }
    append_row(rep, params, "constant_oracle_20", worst, 1e-4, worst <= 1e-4);
  }

  {
    // two-piece hand oracle: (3 + sqrt 5)/2
    std::vector<ExponentFunction::Piece> pieces(2);
    pieces[0].lo = Vector::Constant(1, 0.0);
    pieces[0].hi = Vector::Constant(1, 1.0);
    pieces[0].value = 1.0;
    pieces[1].lo = Vector::Constant(1, 1.0);
    pieces[1].hi = Vector::Constant(1, 2.0);
    pieces[1].value = 0.5;
    const ExponentFunction pw = ExponentFunction::piecewise_test(std::move(pieces), 0.75);
    const SampledFunction f = SampledFunction::sample(
        fixture, [](const Vector& x) { return x(0) >= 0.0 && x(0) < 2.0 ? 1.0 : 0.0; });
    const double expected = (3.0 + std::sqrt(5.0)) / 2.0;
    const double measured = luxemburg_norm(pw, f);
    append_row(rep, params, "piecewise_oracle", measured, expected,
               std::abs(measured - expected) <= 1e-4 * expected);
  }

  {
    // aligned indicators: |1_{B_k}| = b^{k/p0} exactly up to bisection
    const ExponentFunction p0 = ExponentFunction::constant(0.75);
    double worst = 0.0;
    for (int k0 = -2; k0 <= 2; ++k0) {
      const double measured =
          indicator_norm(p0, *line, Ball{Vector::Zero(1), k0}, fixture);
      const double closed = std::pow(2.0, k0 / 0.75);
      worst = std::max(worst, std::abs(measured - closed) / closed);
    }
    append_row(rep, params, "indicator_constant_oracle", worst, 1e-6, worst <= 1e-6);
  }

  // the configured exponent on the configured geometry
  const ExponentFunction& p = *ctx.exponent;
  const DilationStructure& d = *ctx.dil;
  append_row(rep, params, "p_underline", p.p_underline(), std::min(p.p_minus(), 1.0),
             p.p_underline() == std::min(p.p_minus(), 1.0));

  GridSpec local;
  local.dimension = d.dimension();
  local.half_width = d.ball_bounding_radius(1) * 1.3;
  local.resolution = std::min(ctx.cfg.effective_resolution(), 128);
  const SampledFunction bump = default_bump(d, local);
  const std::vector<double> table = exponent_table(p, local);

  {
    const double base = luxemburg_norm_with_table(bump, table);
    double worst = 0.0;
    for (double t : {0.1, 1.0, 7.0}) {
      SampledFunction scaled = bump;
      scaled.scale(Complex(t));
      const double measured = luxemburg_norm_with_table(scaled, table);
      worst = std::max(worst, std::abs(measured - t * base) / (t * base));
    }
    append_row(rep, params, "homogeneity", worst, 1e-6, worst <= 1e-6);

    const double mod = modular_scaled(bump, table, base);
    append_row(rep, params, "unit_ball_modular", mod, 1.0,
               mod >= 1.0 - 1e-4 && mod <= 1.0 + 1e-4);

    SampledFunction bigger = bump;
    bigger.scale(Complex(1.7));
    const double nb = luxemburg_norm_with_table(bigger, table);
    append_row(rep, params, "monotone", base, nb, base <= nb);

    const SampledFunction zero = SampledFunction::zeros(local);
    append_row(rep, params, "zero_function", luxemburg_norm_with_table(zero, table), 0.0,
               luxemburg_norm_with_table(zero, table) == 0.0);
  }

  {
    std::mt19937_64 rng(0x109f0ULL);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const Vector half = d.ball_bounding_box(4);
    std::vector<Vector> samples;
    Vector x(d.dimension());
    for (long i = 0; i < 10000; ++i) {
      for (int k = 0; k < d.dimension(); ++k) x(k) = uni(rng) * half(k);
      samples.push_back(x);
    }
    const LogHolderDiagnostics diag = log_holder_check(p, d, samples);
    rep.summary.metrics["c_log_empirical"] = diag.c_log_empirical;
    rep.summary.metrics["c_inf_empirical"] = diag.c_inf_empirical;
    if (p.family() == ExponentFunction::Family::kLogPerturbed) {
      append_row(rep, params, "decay_constant", diag.c_inf_empirical,
                 std::abs(p.amplitude()) + 1e-9,
                 diag.c_inf_empirical <= std::abs(p.amplitude()) + 1e-9);
    }
    if (p.family() == ExponentFunction::Family::kConstant) {
      append_row(rep, params, "constant_exponent_constants",
                 std::max(diag.c_log_empirical, diag.c_inf_empirical), 1e-12,
                 diag.c_log_empirical == 0.0 && diag.c_inf_empirical == 0.0);
    }
    append_row(rep, params, "conforming_flag", diag.conforming ? 1.0 : 0.0,
               p.log_holder_conforming() ? 1.0 : 0.0,
               diag.conforming == p.log_holder_conforming());
  }

  {
    // indicator norms bracketed by V^(1/p-) .. V^(1/p+) with V the rasterized
    // volume; the modular bracket is exact for the raster itself
    GridSpec wide;
    wide.dimension = d.dimension();
    wide.half_width = d.ball_bounding_radius(2) * 1.3;
    wide.resolution = ctx.cfg.effective_resolution();
    bool ok = true;
    double worst_low = 1.0, worst_high = 1.0;
    for (int k0 = -2; k0 <= 2; ++k0) {
      const SampledFunction raster =
          rasterize_ball(d, Ball{Vector::Zero(d.dimension()), k0}, wide);
      const double vol = raster.integrate().real();
      const double measured = luxemburg_norm(p, raster);
      const double lo = std::pow(vol, 1.0 / p.p_minus());
      const double hi = std::pow(vol, 1.0 / p.p_plus());
      const double lower = std::min(lo, hi), upper = std::max(lo, hi);
      if (measured < lower * (1.0 - 1e-6) || measured > upper * (1.0 + 1e-6)) ok = false;
      worst_low = std::min(worst_low, measured / lower);
      worst_high = std::max(worst_high, measured / upper);
    }
    append_row(rep, params, "indicator_bracket", worst_high, worst_low, ok);
  }

  rep.summary.sup_ratio = rep.summary.metrics["c_inf_empirical"];
  return rep;
}

// ---------------------------------------------------------------------------
// atoms check

VerificationReport check_atoms(RunContext& ctx) {
  VerificationReport rep;
  rep.summary.check = "atoms";
  const DilationStructure& d = *ctx.dil;
  const ExponentFunction& p = *ctx.exponent;
  const AtomicDecomposition& decomp = ensure_decomposition(ctx);
  const Atom& primary = ensure_primary_atom(ctx);
  const std::string params = "count=" + std::to_string(decomp.atoms.size());

  const int s_min = min_moment_order(p, d);
  append_row(rep, params, "s_min", s_min, 0.0, s_min >= 0);

  double worst_size = 0.0, worst_moment = 0.0, worst_leak = 0.0;
  bool all_ok = true;
  for (size_t i = 0; i < decomp.atoms.size(); ++i) {
    const AtomValidation v = validate_atom(d, p, decomp.atoms[i]);
    worst_size = std::max(worst_size, v.size_ratio);
    worst_moment = std::max(worst_moment, v.moment_residual_rel);
    worst_leak = std::max(worst_leak, v.support_leak);
    all_ok = all_ok && v.all_ok();
  }
  {
    const AtomValidation v = validate_atom(d, p, primary);
    worst_size = std::max(worst_size, v.size_ratio);
    worst_moment = std::max(worst_moment, v.moment_residual_rel);
    worst_leak = std::max(worst_leak, v.support_leak);
    all_ok = all_ok && v.all_ok();
  }
  append_row(rep, params, "support_leak", worst_leak, 0.0, worst_leak == 0.0);
  append_row(rep, params, "size_ratio", worst_size, 1.0 + 1e-6, worst_size <= 1.0 + 1e-6);
  append_row(rep, params, "moment_residuals", worst_moment, 1e-8, worst_moment <= 1e-8);
  append_row(rep, params, "validated", all_ok ? 1.0 : 0.0, 1.0, all_ok);

  {
    // mean of the transform at the origin vanishes with the zeroth moment
    const double f0 = std::abs(primary.samples.integrate());
    append_row(rep, params, "zero_mean", f0, 1e-8 * primary.l1_norm,
               f0 <= 1e-8 * primary.l1_norm);
    // size condition met with equality by construction
    const double eq = primary.lr_norm * primary.indicator_variable_norm /
                      (std::isinf(primary.r_exp)
                           ? 1.0
                           : std::pow(d.det_factor(), primary.ball.scale / primary.r_exp));
    append_row(rep, params, "size_equality", eq, 1.0, std::abs(eq - 1.0) <= 1e-6);
    // degree s+1 content survives the correction
    double top = 0.0;
    for (const MultiIndex& gamma :
         multi_indices_up_to(d.dimension(), primary.s_order + 1)) {
      if (total_degree(gamma) != primary.s_order + 1) continue;
      const Complex mom = primary.samples.integrate_weighted([&](const Vector& xx) {
        double v = 1.0;
        for (int dd = 0; dd < d.dimension(); ++dd) {
          for (int e = 0; e < gamma[static_cast<size_t>(dd)]; ++e) v *= xx(dd);
        }
        return v;
      });
      top = std::max(top, std::abs(mom));
    }
    append_row(rep, params, "next_moment_alive", top, 1e-3 * primary.l1_norm,
               top > 1e-3 * primary.l1_norm);
  }

  {
    const CoefficientSumResult res = coefficient_sum_check(p, d, decomp, *ctx.shared_grid);
    append_row(rep, params, "coefficient_sum", res.coefficient_sum, res.norm_expression,
               res.holds);

    AtomicDecomposition single;
    single.coefficients = {Complex(1.0)};
    single.atoms = {decomp.atoms.front()};
    const CoefficientSumResult one = coefficient_sum_check(p, d, single, *ctx.shared_grid);
    append_row(rep, params, "single_atom_equality",
               std::abs(one.norm_expression - one.coefficient_sum), 1e-4,
               std::abs(one.norm_expression - one.coefficient_sum) <= 1e-4 && one.holds);

    AtomicDecomposition zero = single;
    zero.coefficients = {Complex(0.0)};
    const CoefficientSumResult z = coefficient_sum_check(p, d, zero, *ctx.shared_grid);
    append_row(rep, params, "zero_coefficients", z.coefficient_sum, z.norm_expression,
               z.holds && z.coefficient_sum == 0.0);
  }

  {
    // randomized trials of the coefficient-sum inequality
    bool ok = true;
    for (int trial = 0; trial < 10 && ok; ++trial) {
      RunConfig::DecompositionSpec spec = ctx.cfg.decomposition;
      spec.seed = ctx.cfg.decomposition.seed + 101 + static_cast<std::uint64_t>(trial);
      spec.count = 5;
      GridSpec grid;
      const AtomicDecomposition trial_decomp =
          build_decomposition(d, p, spec, ctx.cfg.atom.s, ctx.cfg.grid.box_padding,
                              ctx.cfg.effective_resolution(), &grid);
      ok = coefficient_sum_check(p, d, trial_decomp, grid).holds;
    }
    append_row(rep, params, "coefficient_sum_random_10", ok ? 1.0 : 0.0, 1.0, ok);
  }

  {
    const SampledFunction synth = synthesize(decomp);
    double mass = 0.0;
    for (size_t i = 0; i < decomp.atoms.size(); ++i) {
      mass += std::abs(decomp.coefficients[i]) * decomp.atoms[i].l1_norm;
    }
    const double total = std::abs(synth.integrate());
    append_row(rep, params, "synthesis_mean", total, 1e-8 * mass, total <= 1e-8 * mass);
  }

  if (ctx.cfg.dump_atoms) {
    const fs::path dir(ctx.cfg.output_dir);
    dump_atom((dir / "atom_primary.csv").string(), (dir / "atom_primary.json").string(),
              primary);
  }

  rep.summary.sup_ratio = worst_size;
  rep.summary.metrics["moment_residual_rel"] = worst_moment;
  return rep;
}

// ---------------------------------------------------------------------------
// analysis checks

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    out.push_back(lo * std::pow(hi / lo, t));
  }
  return out;
}

VerificationReport check_lemma31(RunContext& ctx) {
  const DilationStructure& d = *ctx.dil;
  const ExponentFunction& p = *ctx.exponent;
  const Atom& primary = ensure_primary_atom(ctx);

  std::vector<MultiIndex> alphas;
  for (const MultiIndex& a : multi_indices_up_to(d.dimension(), std::min(primary.s_order, 2))) {
    alphas.push_back(a);
  }
  const std::vector<double> radii = log_spaced(1e-3, 1e2, 25);
  const int dirs = std::min(ctx.cfg.scan.directions, 8);

  VerificationReport rep =
      lemma31_scan(d, primary, alphas, radii, dirs, ctx.cfg.grid.box_padding);

  // the constant depends only on the dilation and s: sup ratios across ball
  // scales may spread by at most a factor of 4
  double lo = rep.summary.sup_ratio, hi = rep.summary.sup_ratio;
  for (int k0 = -2; k0 <= 2; ++k0) {
    if (k0 == primary.ball.scale) continue;
    AtomRecipe recipe{Ball{primary.ball.center, k0}, primary.r_exp, primary.s_order,
                      ctx.cfg.atom.seed};
    const GridSpec grid = cover_ball(d, recipe.ball, ctx.cfg.grid.box_padding,
                                     ctx.cfg.effective_resolution());
    const Atom shifted = make_atom(d, p, recipe, grid);
    const VerificationReport sub =
        lemma31_scan(d, shifted, alphas, radii, dirs, ctx.cfg.grid.box_padding);
    lo = std::min(lo, sub.summary.sup_ratio);
    hi = std::max(hi, sub.summary.sup_ratio);
    append_row(rep, "uniformity", "k0=" + std::to_string(k0), sub.summary.sup_ratio, 0.0,
               std::isfinite(sub.summary.sup_ratio));
  }
  append_row(rep, "uniformity", "spread", hi / lo, 4.0, hi / lo <= 4.0);
  rep.summary.metrics["k0_spread"] = hi / lo;
  return rep;
}

VerificationReport check_lemma32(RunContext& ctx) {
  const DilationStructure& d = *ctx.dil;
  const ExponentFunction& p = *ctx.exponent;
  const Atom& primary = ensure_primary_atom(ctx);
  const ScanGrid scan =
      make_scan_grid(d, ctx.cfg.scan.k_min, ctx.cfg.scan.k_max, ctx.cfg.scan.directions);

  VerificationReport rep = lemma32_scan(d, p, primary, scan, ctx.cfg.grid.box_padding);

  double lo = rep.summary.sup_ratio, hi = rep.summary.sup_ratio;
  for (int k0 = -3; k0 <= 3; ++k0) {
    if (k0 == primary.ball.scale) continue;
    AtomRecipe recipe{Ball{primary.ball.center, k0}, primary.r_exp, primary.s_order,
                      ctx.cfg.atom.seed};
    const GridSpec grid = cover_ball(d, recipe.ball, ctx.cfg.grid.box_padding,
                                     ctx.cfg.effective_resolution());
    const Atom shifted = make_atom(d, p, recipe, grid);
    const VerificationReport sub = lemma32_scan(d, p, shifted, scan, ctx.cfg.grid.box_padding);
    lo = std::min(lo, sub.summary.sup_ratio);
    hi = std::max(hi, sub.summary.sup_ratio);
    for (const ReportRow& row : sub.rows) {
      if (row.point.rfind("route;", 0) == 0 && !row.pass) {
        append_row(rep, "k0=" + std::to_string(k0), row.point, row.measured, row.bound, false);
      }
    }
    append_row(rep, "uniformity", "k0=" + std::to_string(k0), sub.summary.sup_ratio, 0.0,
               std::isfinite(sub.summary.sup_ratio));
  }
  append_row(rep, "uniformity", "spread", hi / lo, 4.0, hi / lo <= 4.0);
  rep.summary.metrics["k0_spread"] = hi / lo;
  return rep;
}

VerificationReport check_theorem31(RunContext& ctx) {
  const DilationStructure& d = *ctx.dil;
  const ExponentFunction& p = *ctx.exponent;
  const AtomicDecomposition& decomp = ensure_decomposition(ctx);
  const ScanGrid scan =
      make_scan_grid(d, ctx.cfg.scan.k_min, ctx.cfg.scan.k_max, ctx.cfg.scan.directions);

  VerificationReport rep = theorem31_scan(d, p, decomp, scan);

  // a single normalized atom has aggregated norm 1
  AtomicDecomposition single;
  single.coefficients = {Complex(1.0)};
  single.atoms = {decomp.atoms.front()};
  const double n1 = atomic_norm_expression(p, d, single, *ctx.shared_grid);
  append_row(rep, "single_atom", "norm_is_one", std::abs(n1 - 1.0), 1e-4,
             std::abs(n1 - 1.0) <= 1e-4);
  return rep;
}

VerificationReport check_theorem41(RunContext& ctx) {
  const DilationStructure& d = *ctx.dil;
  const ExponentFunction& p = *ctx.exponent;
  const AtomicDecomposition& decomp = ensure_decomposition(ctx);
  std::vector<double> deltas;
  for (int j = 1; j <= ctx.cfg.scan.delta_count; ++j) deltas.push_back(std::ldexp(1.0, -j));
  return origin_limit_scan(d, p, decomp, ctx.cfg.scan.directions, deltas);
}

VerificationReport check_hardy_littlewood(RunContext& ctx) {
  const DilationStructure& d = *ctx.dil;
  const ExponentFunction& p = *ctx.exponent;
  const AtomicDecomposition& decomp = ensure_decomposition(ctx);
  const int annulus_res = d.dimension() == 3 ? 24 : 48;
  return hardy_littlewood_integral(d, p, decomp, ctx.cfg.scan.k_min, ctx.cfg.scan.k_max,
                                   annulus_res);
}

VerificationReport check_maximal(RunContext& ctx) {
  const DilationStructure& d = *ctx.dil;
  const ExponentFunction& p = *ctx.exponent;
  VerificationReport rep;
  rep.summary.check = "maximal";

  // grid sized to fit the widest kernel; the scale range is clipped when the
  // atom would fall under 8 cells across
  const int m = ctx.cfg.effective_resolution();
  const int k0 = ctx.cfg.atom.k0;
  int i_min = ctx.cfg.maximal.i_min;
  const int i_max = ctx.cfg.maximal.i_max;
  const double atom_radius = d.ball_bounding_radius(k0);
  GridSpec grid;
  grid.dimension = d.dimension();
  grid.resolution = m;
  while (true) {
    const double kernel_reach = d.ball_bounding_radius(-i_min);
    const double decay_reach = d.ball_bounding_radius(4);
    grid.half_width = 1.05 * std::max(kernel_reach + atom_radius, decay_reach);
    if (2.0 * atom_radius / grid.spacing() >= 8.0 || i_min >= 0) break;
    ++i_min;
  }
  if (i_min != ctx.cfg.maximal.i_min) {
    rep.summary.notes.push_back("i_min clipped to " + std::to_string(i_min) +
                                " to keep the atom resolved");
  }
  const std::string params =
      "i=[" + std::to_string(i_min) + "," + std::to_string(i_max) + "]";

  AtomRecipe recipe{Ball{Vector::Zero(d.dimension()), k0}, ctx.cfg.atom.r,
                    ctx.cfg.atom.s.value_or(-1), ctx.cfg.atom.seed};
  const Atom atom = make_atom(d, p, recipe, grid);
  const SampledFunction phi = default_bump(d, grid);

  append_row(rep, params, "phi_mass", std::abs(phi.integrate()), 0.0,
             std::abs(phi.integrate()) > 0.0);

  const SampledFunction maximal = radial_maximal(atom.samples, phi, d, i_min, i_max);

  {
    // the supremum dominates the i = 0 term
    const SampledFunction conv0 = convolve(atom.samples, phi);
    double violation = 0.0;
    for (size_t i = 0; i < maximal.values().size(); ++i) {
      violation = std::max(violation,
                           std::abs(conv0.values()[i]) - maximal.values()[i].real());
    }
    append_row(rep, params, "dominates_i0", violation, 0.0, violation <= 1e-12);
  }

  {
    // widening the range never decreases any value
    const SampledFunction narrow =
        radial_maximal(atom.samples, phi, d, std::max(i_min, -1), std::min(i_max, 1));
    double violation = 0.0;
    for (size_t i = 0; i < maximal.values().size(); ++i) {
      violation = std::max(violation, narrow.values()[i].real() - maximal.values()[i].real());
    }
    append_row(rep, params, "monotone_in_range", violation, 0.0, violation <= 1e-12);
  }

  {
    // decay along the quasi-norm: three shells out never exceeds shell zero
    const std::vector<Vector> dirs = scan_directions(d.dimension(), 8);
    double near = 0.0, far = 0.0;
    for (const Vector& u : dirs) {
      const double t_near = std::sqrt(d.boundary_radius(u, 0) * d.boundary_radius(u, 1));
      const double t_far = std::sqrt(d.boundary_radius(u, 3) * d.boundary_radius(u, 4));
      near = std::max(near, value_at(maximal, t_near * u));
      far = std::max(far, value_at(maximal, t_far * u));
    }
    append_row(rep, params, "decay_in_rho", far, near, far <= near);
  }

  {
    const double proxy = luxemburg_norm(p, maximal);
    AtomicDecomposition single;
    single.coefficients = {Complex(1.0)};
    single.atoms = {atom};
    const double norm = atomic_norm_expression(p, d, single, grid);
    const double ratio = proxy / norm;
    append_row(rep, params, "proxy_band", ratio, 1e2, ratio >= 1e-2 && ratio <= 1e2);
    rep.summary.sup_ratio = ratio;
    rep.summary.metrics["proxy_over_norm"] = ratio;
    rep.summary.metrics["norm_over_proxy"] = 1.0 / ratio;
    rep.summary.notes.push_back(
        "truncated proxy vs aggregated norm: trend comparison only, no equivalence asserted");
  }
  return rep;
}

using CheckFn = VerificationReport (*)(RunContext&);

const std::map<std::string, CheckFn>& check_table() {
  static const std::map<std::string, CheckFn> table = {
      {"dilation", check_dilation},
      {"varexp", check_varexp},
      {"atoms", check_atoms},
      {"lemma31", check_lemma31},
      {"lemma32", check_lemma32},
      {"theorem31", check_theorem31},
      {"theorem41", check_theorem41},
      {"hardy-littlewood", check_hardy_littlewood},
      {"maximal", check_maximal},
  };
  return table;
}

}  // namespace

int run_verification(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    fs::create_directories(cfg.output_dir);

    RunContext ctx;
    ctx.cfg = cfg;
    DilationOptions opts;
    opts.lambda_minus = cfg.lambda_minus;
    opts.lambda_plus = cfg.lambda_plus;
    ctx.dil = DilationStructure::make(cfg.matrix_eigen(), opts);
    ctx.exponent = build_exponent(cfg, ctx.dil);

    std::vector<VerificationReport> reports;
    for (const std::string& name : canonical_checks()) {
      if (std::find(cfg.checks.begin(), cfg.checks.end(), name) == cfg.checks.end()) continue;
      const auto started = std::chrono::steady_clock::now();
      reports.push_back(check_table().at(name)(ctx));
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      char line[160];
      std::snprintf(line, sizeof(line), "%-18s %-4s %8.2fs", name.c_str(),
                    reports.back().summary.pass ? "pass" : "FAIL", secs);
      out << line << "\n";
    }

    std::vector<CheckSummary> summaries;
    for (const VerificationReport& r : reports) summaries.push_back(r.summary);

    const fs::path dir(cfg.output_dir);
    const std::string pins_path = (dir / "pins.json").string();
    std::map<std::string, std::vector<PinOutcome>> pin_outcomes;
    bool pins_created = false;
    if (auto store = PinStore::load(pins_path)) {
      for (const CheckSummary& s : summaries) {
        pin_outcomes[s.check] = store->compare(s);
      }
    } else {
      PinStore::create(pins_path, summaries);
      pins_created = true;
      for (const CheckSummary& s : summaries) {
        std::vector<PinOutcome> outcomes;
        for (const auto& [name, value] : s.metrics) {
          outcomes.push_back({name, value, value, PinStatus::kCreated});
        }
        pin_outcomes[s.check] = outcomes;
      }
    }

    write_report_csv((dir / "report.csv").string(), reports);
    write_summary_json((dir / "summary.json").string(), summaries, pin_outcomes, pins_created);

    std::vector<std::string> failing;
    for (const CheckSummary& s : summaries) {
      bool pin_fail = false;
      for (const PinOutcome& o : pin_outcomes[s.check]) {
        if (o.status == PinStatus::kFailed) pin_fail = true;
      }
      if (!s.pass || pin_fail) failing.push_back(s.check);
    }
    if (!failing.empty()) {
      err << "failing checks:";
      for (const std::string& name : failing) err << ' ' << name;
      err << "\n";
      return 1;
    }
    return 0;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_verification_file(const std::string& config_path, std::ostream& out,
                          std::ostream& err) {
  try {
    const RunConfig cfg = RunConfig::from_file(config_path);
    return run_verification(cfg, out, err);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  }
}

int report_directory(const std::string& dir, std::ostream& out, std::ostream& err) {
  const fs::path path = fs::path(dir) / "summary.json";
  std::ifstream in(path);
  if (!in) {
    err << "ConfigError: no summary.json under " << dir << "\n";
    return 2;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    err << "ConfigError: unreadable summary.json: " << e.what() << "\n";
    return 2;
  }
  char line[256];
  std::snprintf(line, sizeof(line), "%-18s %-14s %-14s %-12s %s", "check", "sup_ratio",
                "pinned", "slope", "verdict");
  out << line << "\n";
  for (const auto& entry : j["checks"]) {
    const std::string check = entry["check"].get<std::string>();
    const double sup = entry["sup_ratio"].get<double>();
    std::string pinned = "-";
    if (entry.contains("pins")) {
      for (const auto& pin : entry["pins"]) {
        if (pin["metric"] == "sup_ratio" || pinned == "-") {
          if (pin["status"] == "checked" || pin["status"] == "failed") {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6e", pin["pinned"].get<double>());
            pinned = buf;
          }
        }
      }
    }
    std::string slope = "-";
    if (!entry["slope"].is_null()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", entry["slope"].get<double>());
      slope = buf;
    }
    std::snprintf(line, sizeof(line), "%-18s %-14.6e %-14s %-12s %s", check.c_str(), sup,
                  pinned.c_str(), slope.c_str(), entry["verdict"].get<std::string>().c_str());
    out << line << "\n";
  }
  out << (j["all_pass"].get<bool>() ? "all checks passed\n" : "failures present\n");
  return 0;
}

}  // namespace aniso
