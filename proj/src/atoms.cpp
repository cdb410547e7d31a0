#include "aniso/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>

#include <json.hpp>

#include "aniso/errors.hpp"

namespace aniso {

namespace {

constexpr double kSizeSlack = 1e-6;
constexpr double kMomentTolerance = 1e-8;
constexpr int kMaxSeedRetries = 12;

double monomial(const Vector& y, const MultiIndex& gamma) {
  double v = 1.0;
  for (size_t d = 0; d < gamma.size(); ++d) {
    for (int e = 0; e < gamma[d]; ++e) v *= y(static_cast<int>(d));
  }
  return v;
}

}  // namespace

int total_degree(const MultiIndex& gamma) {
  int s = 0;
  for (int g : gamma) s += g;
  return s;
}

std::vector<MultiIndex> multi_indices_up_to(int dimension, int max_degree) {
  std::vector<MultiIndex> out;
  MultiIndex cur(static_cast<size_t>(dimension), 0);
  // ordered by total degree, then lexicographic
  for (int deg = 0; deg <= max_degree; ++deg) {
    std::function<void(int, int)> rec = [&](int d, int left) {
      if (d == dimension - 1) {
        cur[static_cast<size_t>(d)] = left;
        out.push_back(cur);
        return;
      }
      for (int g = left; g >= 0; --g) {
        cur[static_cast<size_t>(d)] = g;
        rec(d + 1, left - g);
      }
    };
    rec(0, deg);
  }
  return out;
}

int min_moment_order(const ExponentFunction& p, const DilationStructure& d) {
  const double pm = p.p_minus();
  if (!(pm > 0.0) || pm > 1.0) {
    throw Error(ErrorCode::kConfigError, "moment order needs p_- in (0, 1]");
  }
  const double value =
      (1.0 / pm - 1.0) * std::log(d.det_factor()) / std::log(d.lambda_minus());
  return std::max(0, static_cast<int>(std::floor(value + 1e-9)));
}

double lr_norm_on_grid(const SampledFunction& f, double r_exp) {
  if (std::isinf(r_exp)) return f.max_abs();
  const auto& vals = f.values();
  const double total = pairwise_reduce<double>(
      0, static_cast<std::int64_t>(vals.size()), [&](std::int64_t i) {
        const double a = std::abs(vals[static_cast<size_t>(i)]);
        return a == 0.0 ? 0.0 : std::pow(a, r_exp);
      });
  return std::pow(f.cell_volume() * total, 1.0 / r_exp);
}

double Atom::max_moment_residual() const {
  double mx = 0.0;
  for (const auto& m : moment_residuals) mx = std::max(mx, m.value);
  return mx;
}

Atom make_atom(const DilationStructure& d, const ExponentFunction& p, const AtomRecipe& recipe,
               const GridSpec& grid) {
  const int n = d.dimension();
  if (grid.dimension != n) throw Error(ErrorCode::kGridMismatch, "make_atom: dimension mismatch");
  if (!(recipe.r_exp > 1.0)) {
    throw Error(ErrorCode::kConfigError, "atom integrability exponent must exceed 1");
  }
  const int s_min = min_moment_order(p, d);
  const int s = recipe.s_order < 0 ? s_min : recipe.s_order;
  if (s < s_min) {
    throw Error(ErrorCode::kConfigError,
                "moment order " + std::to_string(s) + " below admissible minimum " +
                    std::to_string(s_min));
  }

  const Ball& ball = recipe.ball;
  const Vector half = d.ball_bounding_box(ball.scale);
  for (int k = 0; k < n; ++k) {
    if (std::abs(ball.center(k)) + half(k) > grid.half_width) {
      throw Error(ErrorCode::kConfigError, "make_atom: grid does not cover the ball");
    }
  }
  const double radius = d.ball_bounding_radius(ball.scale);

  const std::vector<MultiIndex> low_modes = multi_indices_up_to(n, s);
  const std::vector<MultiIndex> seed_modes = multi_indices_up_to(n, s + 1);
  if (low_modes.size() > 20) {
    throw Error(ErrorCode::kConfigError, "moment system larger than 20 modes");
  }

  // smooth bump in ball coordinates: (1 - q)^4 with q the ellipsoid quadratic
  auto bump = [&](const Vector& x) {
    const Vector rel = d.apply_power(x - ball.center, -ball.scale);
    const double q = d.ellipsoid_quadratic(rel);
    if (q >= 1.0) return 0.0;
    const double t = 1.0 - q;
    return t * t * t * t;
  };

  const std::int64_t total = grid.size();
  const double hn = [&] {
    double v = 1.0;
    for (int k = 0; k < n; ++k) v *= grid.spacing();
    return v;
  }();

  for (int attempt = 0; attempt < kMaxSeedRetries; ++attempt) {
    std::mt19937_64 rng(recipe.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> poly_coeff(seed_modes.size());
    for (size_t i = 0; i < seed_modes.size(); ++i) {
      const double u = uni(rng);
      if (total_degree(seed_modes[i]) == s + 1) {
        // keep the top-degree content bounded away from zero so the s+1
        // moments stay generically nonvanishing
        poly_coeff[i] = (u >= 0.0 ? 1.0 : -1.0) * (0.3 + 0.7 * std::abs(u));
      } else {
        poly_coeff[i] = u;
      }
    }

    std::vector<double> base(static_cast<size_t>(total), 0.0);
    std::vector<double> weight(static_cast<size_t>(total), 0.0);
    Vector x(n), y(n);
    double pre_mass = 0.0;
    for (std::int64_t flat = 0; flat < total; ++flat) {
      SampledFunction::decode_node(grid, flat, x);
      const double w = bump(x);
      if (w == 0.0) continue;
      y = (x - ball.center) / radius;
      double poly = 0.0;
      for (size_t i = 0; i < seed_modes.size(); ++i) {
        poly += poly_coeff[i] * monomial(y, seed_modes[i]);
      }
      const double v = w * poly;
      base[static_cast<size_t>(flat)] = v;
      weight[static_cast<size_t>(flat)] = w;
      pre_mass += v * v;
    }
    if (pre_mass <= 0.0) continue;

    // Correction c solves the bump-weighted moment system so that
    // <a, y^gamma> = 0 on the grid for all |gamma| <= s, with
    // a = base - bump * sum_c c_delta y^delta.
    const size_t nm = low_modes.size();
    Matrix gram = Matrix::Zero(static_cast<int>(nm), static_cast<int>(nm));
    Vector rhs = Vector::Zero(static_cast<int>(nm));
    std::vector<double> mono(nm);
    for (std::int64_t flat = 0; flat < total; ++flat) {
      const double w = weight[static_cast<size_t>(flat)];
      if (w == 0.0) continue;
      SampledFunction::decode_node(grid, flat, x);
      y = (x - ball.center) / radius;
      for (size_t i = 0; i < nm; ++i) mono[i] = monomial(y, low_modes[i]);
      const double v = base[static_cast<size_t>(flat)];
      for (size_t i = 0; i < nm; ++i) {
        rhs(static_cast<int>(i)) += v * mono[i];
        for (size_t j = i; j < nm; ++j) {
          gram(static_cast<int>(i), static_cast<int>(j)) += w * mono[i] * mono[j];
        }
      }
    }
    for (size_t i = 0; i < nm; ++i) {
      for (size_t j = 0; j < i; ++j) {
        gram(static_cast<int>(i), static_cast<int>(j)) = gram(static_cast<int>(j), static_cast<int>(i));
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const double ev_min = es.eigenvalues().minCoeff();
    const double ev_max = es.eigenvalues().maxCoeff();
    if (!(ev_min > 0.0) || ev_max / ev_min > 1e12) {
      throw Error(ErrorCode::kGramIllConditioned,
                  "moment system condition exceeds 1e12; raise the resolution");
    }
    Vector corr = gram.ldlt().solve(rhs);

    std::vector<Complex> vals(static_cast<size_t>(total));
    double post_mass = 0.0;
    for (std::int64_t flat = 0; flat < total; ++flat) {
      const double w = weight[static_cast<size_t>(flat)];
      if (w == 0.0) continue;
      SampledFunction::decode_node(grid, flat, x);
      y = (x - ball.center) / radius;
      double fix = 0.0;
      for (size_t i = 0; i < nm; ++i) fix += corr(static_cast<int>(i)) * monomial(y, low_modes[i]);
      const double v = base[static_cast<size_t>(flat)] - w * fix;
      vals[static_cast<size_t>(flat)] = v;
      post_mass += v * v;
    }
    if (post_mass < 1e-6 * pre_mass) continue;  // degenerate seed, retry

    SampledFunction samples(grid, std::move(vals), ball);

    // scale so the size condition holds with equality:
    // |a|_r = |B|^(1/r) / |1_B| with |B| = b^k exact
    const double ind_norm = indicator_norm(p, d, ball, grid);
    const double size_target =
        (std::isinf(recipe.r_exp) ? 1.0
                                  : std::pow(d.det_factor(), ball.scale / recipe.r_exp)) /
        ind_norm;
    const double lr = lr_norm_on_grid(samples, recipe.r_exp);
    if (!(lr > 0.0)) continue;
    samples.scale(Complex(size_target / lr));

    Atom atom{ball, recipe.r_exp, s, std::move(samples), 0.0, 0.0, ind_norm, {}, {}};
    const double total_scale = size_target / lr;
    {
      const Matrix ball_inv = [&] {
        Matrix mm = Matrix::Identity(n, n);
        const Matrix& step = (ball.scale >= 0) ? d.matrix_inverse() : d.matrix();
        for (int j = 0; j < std::abs(ball.scale); ++j) mm = step * mm;
        return mm;
      }();
      const Matrix form = d.unit_ellipsoid().form;
      const double level = d.unit_ellipsoid().level;
      const Vector center = ball.center;
      atom.closed_form = [ball_inv, form, level, center, radius, seed_modes, poly_coeff,
                          low_modes, corr, total_scale](const Vector& xx) -> double {
        const Vector rel = ball_inv * (xx - center);
        const double q = rel.dot(form * rel) / level;
        if (q >= 1.0) return 0.0;
        const double t = 1.0 - q;
        const Vector yy = (xx - center) / radius;
        double poly = 0.0;
        for (size_t i = 0; i < seed_modes.size(); ++i) {
          poly += poly_coeff[i] * monomial(yy, seed_modes[i]);
        }
        double fix = 0.0;
        for (size_t i = 0; i < low_modes.size(); ++i) {
          fix += corr(static_cast<int>(i)) * monomial(yy, low_modes[i]);
        }
        return total_scale * t * t * t * t * (poly - fix);
      };
    }
    atom.lr_norm = lr_norm_on_grid(atom.samples, recipe.r_exp);
    atom.l1_norm = [&] {
      const auto& vv = atom.samples.values();
      const double t = pairwise_reduce<double>(
          0, static_cast<std::int64_t>(vv.size()),
          [&](std::int64_t i) { return std::abs(vv[static_cast<size_t>(i)]); });
      return hn * t;
    }();
    atom.moment_residuals.reserve(nm);
    for (const MultiIndex& gamma : low_modes) {
      const Complex mom = atom.samples.integrate_weighted(
          [&](const Vector& xx) { return monomial(xx, gamma); });
      atom.moment_residuals.push_back({gamma, std::abs(mom)});
    }
    return atom;
  }
  throw Error(ErrorCode::kDegenerateSeed,
              "atom seed collapsed under moment correction after retries");
}

AtomValidation validate_atom(const DilationStructure& d, const ExponentFunction& p,
                             const Atom& atom) {
  AtomValidation v;
  const GridSpec& grid = atom.samples.grid();
  const auto& vals = atom.samples.values();

  Vector x(grid.dimension);
  double leak = 0.0;
  for (std::int64_t flat = 0; flat < grid.size(); ++flat) {
    const Complex val = vals[static_cast<size_t>(flat)];
    if (val == Complex(0.0)) continue;
    SampledFunction::decode_node(grid, flat, x);
    if (!d.in_ball(x - atom.ball.center, atom.ball.scale)) {
      leak = std::max(leak, std::abs(val));
    }
  }
  v.support_leak = leak;
  v.support_ok = leak == 0.0;

  const double lr = lr_norm_on_grid(atom.samples, atom.r_exp);
  const double ind = indicator_norm(p, d, atom.ball, grid);
  const double bound =
      (std::isinf(atom.r_exp) ? 1.0 : std::pow(d.det_factor(), atom.ball.scale / atom.r_exp)) /
      ind;
  v.size_ratio = lr / bound;
  v.size_ok = v.size_ratio <= 1.0 + kSizeSlack;

  double l1 = 0.0;
  for (const Complex& val : vals) l1 += std::abs(val);
  l1 *= atom.samples.cell_volume();
  double worst = 0.0;
  for (const MultiIndex& gamma : multi_indices_up_to(grid.dimension, atom.s_order)) {
    const Complex mom = atom.samples.integrate_weighted(
        [&](const Vector& xx) { return monomial(xx, gamma); });
    worst = std::max(worst, std::abs(mom));
  }
  v.moment_residual_rel = l1 > 0.0 ? worst / l1 : 0.0;
  v.moments_ok = worst <= kMomentTolerance * l1;
  return v;
}

double atomic_norm_expression(const ExponentFunction& p, const DilationStructure& d,
                              const AtomicDecomposition& decomp, const GridSpec& grid) {
  const size_t count = decomp.atoms.size();
  if (count == 0 || decomp.coefficients.size() != count) {
    throw Error(ErrorCode::kConfigError, "decomposition needs matching coefficients and atoms");
  }
  if (count > kMaxDecompositionSize) {
    throw Error(ErrorCode::kConfigError, "decomposition exceeds the supported size");
  }
  const double p_ul = p.p_underline();

  std::vector<double> inv_ind(count);
  std::vector<SampledFunction> rasters;
  rasters.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    rasters.push_back(rasterize_ball(d, decomp.atoms[i].ball, grid));
  }
  const std::vector<double> table = exponent_table(p, grid);
  for (size_t i = 0; i < count; ++i) {
    inv_ind[i] = 1.0 / luxemburg_norm_with_table(rasters[i], table);
  }

  std::vector<Complex> agg(static_cast<size_t>(grid.size()), Complex(0.0));
  for (size_t i = 0; i < count; ++i) {
    const double c = std::abs(decomp.coefficients[i]) * inv_ind[i];
    if (c == 0.0) continue;
    const double term = std::pow(c, p_ul);
    const auto& rv = rasters[i].values();
    for (std::int64_t flat = 0; flat < grid.size(); ++flat) {
      if (rv[static_cast<size_t>(flat)] != Complex(0.0)) {
        agg[static_cast<size_t>(flat)] += term;
      }
    }
  }
  for (Complex& v : agg) {
    if (v != Complex(0.0)) v = std::pow(v.real(), 1.0 / p_ul);
  }
  SampledFunction aggregated(grid, std::move(agg));
  return luxemburg_norm_with_table(aggregated, table);
}

CoefficientSumResult coefficient_sum_check(const ExponentFunction& p, const DilationStructure& d,
                                           const AtomicDecomposition& decomp,
                                           const GridSpec& grid) {
  CoefficientSumResult res;
  for (const auto& c : decomp.coefficients) res.coefficient_sum += std::abs(c);
  if (res.coefficient_sum == 0.0) {
    res.norm_expression = 0.0;
    res.holds = true;
    return res;
  }
  res.norm_expression = atomic_norm_expression(p, d, decomp, grid);
  res.holds = res.coefficient_sum <= res.norm_expression * (1.0 + 1e-4);
  return res;
}

SampledFunction synthesize(const AtomicDecomposition& decomp) {
  if (decomp.atoms.empty() || decomp.coefficients.size() != decomp.atoms.size()) {
    throw Error(ErrorCode::kConfigError, "decomposition needs matching coefficients and atoms");
  }
  const GridSpec& grid = decomp.atoms.front().samples.grid();
  for (const Atom& a : decomp.atoms) {
    if (!(a.samples.grid() == grid)) {
      throw Error(ErrorCode::kGridMismatch, "synthesize: atoms live on different grids");
    }
  }
  std::vector<Complex> out(static_cast<size_t>(grid.size()), Complex(0.0));
  for (size_t i = 0; i < decomp.atoms.size(); ++i) {
    const Complex c = decomp.coefficients[i];
    if (c == Complex(0.0)) continue;
    const auto& av = decomp.atoms[i].samples.values();
    for (std::int64_t flat = 0; flat < grid.size(); ++flat) {
      out[static_cast<size_t>(flat)] += c * av[static_cast<size_t>(flat)];
    }
  }
  return SampledFunction(grid, std::move(out));
}

void dump_atom(const std::string& csv_path, const std::string& json_path, const Atom& atom) {
  write_samples_csv(csv_path, atom.samples);
  nlohmann::ordered_json j;
  j["ball"]["center"] = std::vector<double>(atom.ball.center.data(),
                                            atom.ball.center.data() + atom.ball.center.size());
  j["ball"]["scale"] = atom.ball.scale;
  j["r"] = std::isinf(atom.r_exp) ? nlohmann::ordered_json("inf")
                                  : nlohmann::ordered_json(atom.r_exp);
  j["s"] = atom.s_order;
  j["lr_norm"] = atom.lr_norm;
  j["l1_norm"] = atom.l1_norm;
  j["indicator_variable_norm"] = atom.indicator_variable_norm;
  auto residuals = nlohmann::ordered_json::array();
  for (const auto& m : atom.moment_residuals) {
    residuals.push_back({{"gamma", m.gamma}, {"value", m.value}});
  }
  j["moment_residuals"] = residuals;
  std::ofstream out(json_path);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot open " + json_path);
  out << j.dump(2) << '\n';
}

}  // namespace aniso
