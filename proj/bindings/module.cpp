#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "aniso/analysis.hpp"
#include "aniso/errors.hpp"
#include "aniso/atoms.hpp"
#include "aniso/config.hpp"
#include "aniso/dilation.hpp"
#include "aniso/runner.hpp"
#include "aniso/sampling.hpp"
#include "aniso/varexp.hpp"

namespace py = pybind11;
using namespace aniso;

namespace {

/// pybind-side handle: pybind11 cannot hold shared_ptr<const T> directly.
struct PyDilation {
  DilationPtr ptr;
  const DilationStructure& ref() const { return *ptr; }
};

py::dict summary_to_dict(const CheckSummary& s) {
  py::dict out;
  out["check"] = s.check;
  out["sup_ratio"] = s.sup_ratio;
  if (s.slope) out["slope"] = *s.slope;
  out["pass"] = s.pass;
  py::dict metrics;
  for (const auto& [name, value] : s.metrics) metrics[py::str(name)] = value;
  out["metrics"] = metrics;
  out["notes"] = s.notes;
  return out;
}

SampledFunction make_sampled(const GridSpec& grid, py::array values) {
  auto arr = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>(values);
  if (arr.size() != grid.size()) {
    throw Error(ErrorCode::kGridMismatch, "value count does not match grid size");
  }
  std::vector<Complex> vals(arr.data(), arr.data() + arr.size());
  return SampledFunction(grid, std::move(vals));
}

py::array values_array(const SampledFunction& f) {
  const int n = f.grid().dimension;
  std::vector<py::ssize_t> shape(static_cast<size_t>(n), f.grid().resolution);
  py::array_t<std::complex<double>> arr(shape);
  std::copy(f.values().begin(), f.values().end(), arr.mutable_data());
  return arr;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "anisotropic variable-exponent Hardy space machinery";

  py::register_exception<Error>(m, "AnisoError");

  py::class_<Ball>(m, "Ball")
      .def(py::init([](const Vector& center, int scale) {
             return Ball{center, scale};
           }),
           py::arg("center"), py::arg("scale"))
      .def_readonly("center", &Ball::center)
      .def_readonly("scale", &Ball::scale);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](int dimension, double half_width, int resolution) {
             GridSpec g;
             g.dimension = dimension;
             g.half_width = half_width;
             g.resolution = resolution;
             return g;
           }),
           py::arg("dimension"), py::arg("half_width"), py::arg("resolution"))
      .def_readonly("dimension", &GridSpec::dimension)
      .def_readonly("half_width", &GridSpec::half_width)
      .def_readonly("resolution", &GridSpec::resolution)
      .def_property_readonly("spacing", &GridSpec::spacing);

  m.def("spectrum", [](const Matrix& a) {
    const SpectrumInfo info = spectrum(a);
    return py::make_tuple(info.moduli, info.abs_det);
  });

  py::class_<PyDilation>(m, "Dilation")
      .def_static(
          "make",
          [](const Matrix& a, std::optional<double> lambda_minus,
             std::optional<double> lambda_plus) {
            DilationOptions opts;
            opts.lambda_minus = lambda_minus;
            opts.lambda_plus = lambda_plus;
            return PyDilation{DilationStructure::make(a, opts)};
          },
          py::arg("matrix"), py::arg("lambda_minus") = std::nullopt,
          py::arg("lambda_plus") = std::nullopt)
      .def_property_readonly("dimension",
                             [](const PyDilation& d) { return d.ref().dimension(); })
      .def_property_readonly("b", [](const PyDilation& d) { return d.ref().det_factor(); })
      .def_property_readonly("eig_min", [](const PyDilation& d) { return d.ref().eig_min(); })
      .def_property_readonly("eig_max", [](const PyDilation& d) { return d.ref().eig_max(); })
      .def_property_readonly("lambda_minus",
                             [](const PyDilation& d) { return d.ref().lambda_minus(); })
      .def_property_readonly("lambda_plus",
                             [](const PyDilation& d) { return d.ref().lambda_plus(); })
      .def_property_readonly("expansion_factor",
                             [](const PyDilation& d) { return d.ref().expansion_factor(); })
      .def_property_readonly("tau", [](const PyDilation& d) { return d.ref().tau(); })
      .def("adjoint", [](const PyDilation& d) { return PyDilation{d.ref().adjoint()}; })
      .def("quasi_norm",
           [](const PyDilation& d, const Vector& x) { return d.ref().quasi_norm(x); })
      .def("shell_index",
           [](const PyDilation& d, const Vector& x) { return d.ref().shell_index(x); })
      .def("in_ball",
           [](const PyDilation& d, const Vector& x, int i) { return d.ref().in_ball(x, i); })
      .def("apply_power",
           [](const PyDilation& d, const Vector& x, int k) { return d.ref().apply_power(x, k); })
      .def("ball_volume", [](const PyDilation& d, int i) { return d.ref().ball_volume(i); })
      .def("ball_bounding_radius",
           [](const PyDilation& d, int i) { return d.ref().ball_bounding_radius(i); });

  m.def("comparability_band", [](const PyDilation& d, const std::vector<Vector>& samples) {
    const ComparabilityBand band = comparability_band(d.ref(), samples);
    py::dict out;
    out["exp_minus"] = band.exp_minus;
    out["exp_plus"] = band.exp_plus;
    out["small_rho"] = py::make_tuple(band.small_rho.c_low, band.small_rho.c_high);
    out["large_rho"] = py::make_tuple(band.large_rho.c_low, band.large_rho.c_high);
    return out;
  });

  py::class_<ExponentFunction>(m, "Exponent")
      .def_static("constant", &ExponentFunction::constant)
      .def_static(
          "log_perturbed",
          [](double p_inf, double amplitude, const PyDilation& geometry) {
            return ExponentFunction::log_perturbed(p_inf, amplitude, geometry.ptr);
          },
          py::arg("p_inf"), py::arg("amplitude"), py::arg("geometry"))
      .def_property_readonly("p_minus", &ExponentFunction::p_minus)
      .def_property_readonly("p_plus", &ExponentFunction::p_plus)
      .def_property_readonly("p_underline", &ExponentFunction::p_underline)
      .def("__call__", &ExponentFunction::operator());

  py::class_<SampledFunction>(m, "SampledFunction")
      .def(py::init(&make_sampled), py::arg("grid"), py::arg("values"))
      .def_property_readonly("grid", &SampledFunction::grid)
      .def_property_readonly("values", &values_array)
      .def("integrate", &SampledFunction::integrate)
      .def("max_abs", &SampledFunction::max_abs);

  m.def("dft_at", &dft_at, py::arg("f"), py::arg("xi"));
  m.def("dft_alias_risk", &dft_alias_risk);
  m.def("dilate_samples",
        [](const SampledFunction& f, const PyDilation& d, int k) {
          return dilate_samples(f, d.ref(), k);
        });
  m.def("convolve", &convolve);
  m.def("rasterize_ball", [](const PyDilation& d, const Ball& ball, const GridSpec& grid) {
    return rasterize_ball(d.ref(), ball, grid);
  });
  m.def("cover_ball", [](const PyDilation& d, const Ball& ball, double padding,
                         int resolution) { return cover_ball(d.ref(), ball, padding, resolution); });
  m.def("default_bump",
        [](const PyDilation& d, const GridSpec& grid) { return default_bump(d.ref(), grid); });

  m.def("modular", &modular);
  m.def("luxemburg_norm", &luxemburg_norm);
  m.def("indicator_norm", [](const ExponentFunction& p, const PyDilation& d, const Ball& ball,
                             const GridSpec& grid) { return indicator_norm(p, d.ref(), ball, grid); });

  m.def("min_moment_order", [](const ExponentFunction& p, const PyDilation& d) {
    return min_moment_order(p, d.ref());
  });

  py::class_<Atom>(m, "Atom")
      .def_readonly("ball", &Atom::ball)
      .def_readonly("r_exp", &Atom::r_exp)
      .def_readonly("s_order", &Atom::s_order)
      .def_readonly("lr_norm", &Atom::lr_norm)
      .def_readonly("l1_norm", &Atom::l1_norm)
      .def_property_readonly("samples", [](const Atom& a) { return a.samples; })
      .def_property_readonly("max_moment_residual", &Atom::max_moment_residual);

  m.def(
      "make_atom",
      [](const PyDilation& d, const ExponentFunction& p, const Ball& ball, double r_exp,
         int s_order, std::uint64_t seed, const GridSpec& grid) {
        AtomRecipe recipe{ball, r_exp, s_order, seed};
        return make_atom(d.ref(), p, recipe, grid);
      },
      py::arg("dilation"), py::arg("exponent"), py::arg("ball"), py::arg("r_exp"),
      py::arg("s_order"), py::arg("seed"), py::arg("grid"));

  m.def("validate_atom", [](const PyDilation& d, const ExponentFunction& p, const Atom& atom) {
    const AtomValidation v = validate_atom(d.ref(), p, atom);
    py::dict out;
    out["support_ok"] = v.support_ok;
    out["size_ok"] = v.size_ok;
    out["moments_ok"] = v.moments_ok;
    out["size_ratio"] = v.size_ratio;
    out["moment_residual_rel"] = v.moment_residual_rel;
    out["all_ok"] = v.all_ok();
    return out;
  });

  py::class_<AtomicDecomposition>(m, "AtomicDecomposition")
      .def(py::init([](std::vector<std::complex<double>> coeffs, std::vector<Atom> atoms) {
             AtomicDecomposition d;
             d.coefficients = std::move(coeffs);
             d.atoms = std::move(atoms);
             return d;
           }),
           py::arg("coefficients"), py::arg("atoms"))
      .def_readonly("coefficients", &AtomicDecomposition::coefficients);

  m.def("atomic_norm_expression",
        [](const ExponentFunction& p, const PyDilation& d, const AtomicDecomposition& decomp,
           const GridSpec& grid) { return atomic_norm_expression(p, d.ref(), decomp, grid); });
  m.def("coefficient_sum_check",
        [](const ExponentFunction& p, const PyDilation& d, const AtomicDecomposition& decomp,
           const GridSpec& grid) {
          const CoefficientSumResult r = coefficient_sum_check(p, d.ref(), decomp, grid);
          return py::make_tuple(r.coefficient_sum, r.norm_expression, r.holds);
        });
  m.def("synthesize", &synthesize);

  m.def("make_scan_grid", [](const PyDilation& d, int k_min, int k_max, int directions) {
    return make_scan_grid(d.ref(), k_min, k_max, directions);
  });
  py::class_<ScanGrid>(m, "ScanGrid")
      .def_property_readonly("size",
                             [](const ScanGrid& s) { return s.points.size(); });

  m.def("lemma31_scan",
        [](const PyDilation& d, const Atom& atom, const std::vector<MultiIndex>& alphas,
           const std::vector<double>& radii, int directions, double padding) {
          return summary_to_dict(
              lemma31_scan(d.ref(), atom, alphas, radii, directions, padding).summary);
        });
  m.def("lemma32_scan", [](const PyDilation& d, const ExponentFunction& p, const Atom& atom,
                           const ScanGrid& scan, double padding) {
    return summary_to_dict(lemma32_scan(d.ref(), p, atom, scan, padding).summary);
  });
  m.def("theorem31_scan",
        [](const PyDilation& d, const ExponentFunction& p, const AtomicDecomposition& decomp,
           const ScanGrid& scan) {
          return summary_to_dict(theorem31_scan(d.ref(), p, decomp, scan).summary);
        });
  m.def("origin_limit_scan",
        [](const PyDilation& d, const ExponentFunction& p, const AtomicDecomposition& decomp,
           int directions, const std::vector<double>& deltas) {
          return summary_to_dict(origin_limit_scan(d.ref(), p, decomp, directions, deltas).summary);
        });
  m.def("hardy_littlewood_integral",
        [](const PyDilation& d, const ExponentFunction& p, const AtomicDecomposition& decomp,
           int k_min, int k_max, int annulus_resolution) {
          return summary_to_dict(
              hardy_littlewood_integral(d.ref(), p, decomp, k_min, k_max, annulus_resolution)
                  .summary);
        });
  m.def("radial_maximal",
        [](const SampledFunction& f, const SampledFunction& phi, const PyDilation& d,
           int i_min, int i_max) { return radial_maximal(f, phi, d.ref(), i_min, i_max); });
  m.def("hardy_norm_proxy",
        [](const SampledFunction& f, const SampledFunction& phi, const PyDilation& d,
           const ExponentFunction& p, int i_min, int i_max) {
          return hardy_norm_proxy(f, phi, d.ref(), p, i_min, i_max);
        });

  m.def(
      "run_config",
      [](const std::string& config_json) {
        const RunConfig cfg = RunConfig::from_json_text(config_json);
        std::ostringstream out, err;
        const int code = run_verification(cfg, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "run the verification pipeline from a JSON config string; returns (exit_code, stdout, stderr)");
  m.def("run_config_file", [](const std::string& path) {
    std::ostringstream out, err;
    const int code = run_verification_file(path, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
