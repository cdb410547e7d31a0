#include <doctest.h>

#include <cmath>
#include <random>

#include "aniso/analysis.hpp"
#include "aniso/errors.hpp"

using namespace aniso;

namespace {

DilationPtr line2() {
  Matrix m(1, 1);
  m << 2.0;
  return DilationStructure::make(m);
}

DilationPtr rot2() {
  Matrix m(2, 2);
  m << 0, -2, 1, 0;
  return DilationStructure::make(m);
}

GridSpec grid1(double half, int m) {
  GridSpec g;
  g.dimension = 1;
  g.half_width = half;
  g.resolution = m;
  return g;
}

Atom line_atom(const DilationPtr& d, const ExponentFunction& p, int k0, int s,
               std::uint64_t seed, int m = 2048) {
  const GridSpec g = cover_ball(*d, Ball{Vector::Zero(1), k0}, 1.25, m);
  return make_atom(*d, p, AtomRecipe{Ball{Vector::Zero(1), k0}, 2.0, s, seed}, g);
}

bool all_rows_pass(const VerificationReport& rep, const std::string& prefix) {
  bool any = false;
  for (const ReportRow& row : rep.rows) {
    if (row.point.rfind(prefix, 0) == 0) {
      any = true;
      if (!row.pass) return false;
    }
  }
  return any;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("scan grid sits exactly on its shells") {
  const ScanGrid scan = make_scan_grid(*rot2(), -5, 5, 12);
  const DilationPtr adj = rot2()->adjoint();
  CHECK(scan.points.size() == 11 * 12);
  for (const ScanPoint& pt : scan.points) {
    CHECK(adj->shell_index(pt.x) == pt.shell - 1);
    CHECK(pt.rho_star == power_int(adj->det_factor(), pt.shell - 1));
  }
}

TEST_CASE("derivative transform: origin value, symmetry, finite differences") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::constant(0.8);
  const Atom atom = line_atom(d, p, 1, 1, 7);
  const SampledFunction dil = dilated_atom(*d, atom, 1.25);

  // zeroth moment of the dilated atom vanishes with the atom's
  const MultiIndex zero{0};
  Vector origin(1);
  origin << 0.0;
  CHECK(std::abs(dilated_ft_derivative(dil, zero, origin)) <=
        1e-8 * d->ball_volume(-atom.ball.scale) * atom.l1_norm);

  // real atoms: derivative transforms obey F(-x) = (-1)^|a| conj(F(x))
  const MultiIndex one{1};
  for (double w : {0.4, 2.0}) {
    Vector plus(1), minus(1);
    plus << w;
    minus << -w;
    const Complex a0 = dilated_ft_derivative(dil, zero, plus);
    const Complex b0 = dilated_ft_derivative(dil, zero, minus);
    CHECK(std::abs(b0 - std::conj(a0)) <= 1e-14 * std::abs(a0));
    const Complex a1 = dilated_ft_derivative(dil, one, plus);
    const Complex b1 = dilated_ft_derivative(dil, one, minus);
    CHECK(std::abs(b1 + std::conj(a1)) <= 1e-12 * std::abs(a1));
  }

  // first derivative against a centered difference of the transform
  const double dh = 1e-3;
  for (double w : {0.3, 1.1}) {
    Vector xp(1), xm(1), x(1);
    xp << w + dh;
    xm << w - dh;
    x << w;
    const Complex fd =
        (dilated_ft_derivative(dil, zero, xp) - dilated_ft_derivative(dil, zero, xm)) /
        (2.0 * dh);
    const Complex an = dilated_ft_derivative(dil, one, x);
    CHECK(std::abs(fd - an) <= 1e-3 * std::abs(an));
  }
}

TEST_CASE("derivative decay scan: slopes and scale uniformity") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::constant(0.5);
  const int s = min_moment_order(p, *d);
  REQUIRE(s == 1);

  std::vector<double> radii;
  for (int i = 0; i < 25; ++i) radii.push_back(1e-3 * std::pow(1e5, i / 24.0));
  const std::vector<MultiIndex> alphas = {{0}, {1}};

  double lo = 0.0, hi = 0.0;
  for (int k0 = -2; k0 <= 2; ++k0) {
    const Atom atom = line_atom(d, p, k0, s, 17, 4096);
    const VerificationReport rep = lemma31_scan(*d, atom, alphas, radii, 2, 1.25);
    CHECK(rep.summary.pass);
    REQUIRE(rep.summary.slope.has_value());
    // numerator behaves like |x|^(s - |alpha| + 1) near the origin
    CHECK(*rep.summary.slope >= s - 1 + 1 - 0.15);
    CHECK(all_rows_pass(rep, "slope"));
    const double sup = rep.summary.sup_ratio;
    CHECK(std::isfinite(sup));
    lo = (k0 == -2) ? sup : std::min(lo, sup);
    hi = (k0 == -2) ? sup : std::max(hi, sup);
  }
  CHECK(hi / lo <= 4.0);
}

TEST_CASE("shell envelope scan with dual-route cross-check") {
  const DilationPtr d = line2();
  const ScanGrid scan = make_scan_grid(*d, -6, 6, 2);

  {
    // p = 1: both envelope exponents are 0, the bound is the L1 norm
    const ExponentFunction p = ExponentFunction::constant(1.0);
    const Atom atom = line_atom(d, p, 0, 0, 23, 4096);
    const VerificationReport rep = lemma32_scan(*d, p, atom, scan, 1.25);
    CHECK(rep.summary.pass);
    CHECK(rep.summary.sup_ratio <= atom.l1_norm * 1.01);
    CHECK(all_rows_pass(rep, "route"));
  }
  {
    const ExponentFunction p = ExponentFunction::constant(0.5);
    double lo = 0.0, hi = 0.0;
    for (int k0 = -3; k0 <= 3; ++k0) {
      const Atom atom = line_atom(d, p, k0, 1, 29, 4096);
      const VerificationReport rep = lemma32_scan(*d, p, atom, scan, 1.25);
      CHECK(rep.summary.pass);
      CHECK(all_rows_pass(rep, "route"));
      CHECK(rep.summary.metrics.count("origin_constant") == 1);
      const double sup = rep.summary.sup_ratio;
      lo = (k0 == -3) ? sup : std::min(lo, sup);
      hi = (k0 == -3) ? sup : std::max(hi, sup);
    }
    CHECK(hi / lo <= 4.0);
  }
}

TEST_CASE("decomposition scan reduces to the single-atom case") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::constant(0.75);
  const GridSpec g = grid1(4.0, 4096);
  const Atom atom =
      make_atom(*d, p, AtomRecipe{Ball{Vector::Zero(1), 0}, 2.0, -1, 31}, g);
  const ScanGrid scan = make_scan_grid(*d, -5, 5, 2);

  AtomicDecomposition single;
  single.coefficients = {Complex(1.0)};
  single.atoms = {atom};
  const VerificationReport rep31 = theorem31_scan(*d, p, single, scan);
  CHECK(rep31.summary.pass);

  const VerificationReport rep32 = lemma32_scan(*d, p, atom, scan, 1.25);
  CHECK(rep31.summary.sup_ratio ==
        doctest::Approx(rep32.summary.sup_ratio).epsilon(1e-3));
  CHECK(all_rows_pass(rep31, "rescale"));
}

TEST_CASE("random decomposition scans stay bounded") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::constant(0.75);
  const GridSpec g = grid1(5.0, 1024);
  const ScanGrid scan = make_scan_grid(*d, -5, 5, 2);
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> mag(-2.0, 2.0);
  std::uniform_real_distribution<double> ctr(-2.0, 2.0);
  std::uniform_int_distribution<int> kd(0, 2);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    AtomicDecomposition decomp;
    for (int i = 0; i < 5; ++i) {
      AtomRecipe recipe{Ball{Vector::Constant(1, ctr(rng)), kd(rng)}, 2.0, 0,
                        5000 + static_cast<std::uint64_t>(trial) * 8 + i};
      decomp.atoms.push_back(make_atom(*d, p, recipe, g));
      decomp.coefficients.push_back(Complex(std::pow(10.0, mag(rng))));
    }
    const VerificationReport rep = theorem31_scan(*d, p, decomp, scan);
    CHECK(rep.summary.pass);
    CHECK(std::isfinite(rep.summary.sup_ratio));
    worst = std::max(worst, rep.summary.sup_ratio);
  }
  CHECK(worst > 0.0);
  CHECK(worst < 1e3);  // comfortably bounded at this scale
}

TEST_CASE("origin limit: decay, slope, and grid refinement stability") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::constant(1.0);
  std::vector<double> deltas;
  for (int j = 1; j <= 12; ++j) deltas.push_back(std::ldexp(1.0, -j));

  auto build = [&](int m) {
    AtomicDecomposition decomp;
    decomp.coefficients = {Complex(1.0)};
    decomp.atoms = {line_atom(d, p, 0, 0, 37, m)};
    return decomp;
  };

  const AtomicDecomposition decomp = build(2048);
  const VerificationReport rep = origin_limit_scan(*d, p, decomp, 2, deltas);
  CHECK(rep.summary.pass);
  REQUIRE(rep.summary.slope.has_value());
  const double rate = std::log(d->lambda_minus()) / std::log(d->det_factor());
  CHECK(*rep.summary.slope >= rate - 0.15);
  CHECK(*rep.summary.slope > 0.0);
  CHECK(all_rows_pass(rep, "decay"));
  CHECK(all_rows_pass(rep, "origin"));

  // doubling the construction resolution leaves every ratio nearly unchanged
  const VerificationReport fine = origin_limit_scan(*d, p, build(4096), 2, deltas);
  auto ratios = [](const VerificationReport& r) {
    std::vector<double> out;
    for (const ReportRow& row : r.rows) {
      if (row.point.rfind("decay", 0) == 0) out.push_back(row.measured);
    }
    return out;
  };
  const std::vector<double> a = ratios(rep), b = ratios(fine);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - b[i]) <= 1e-3 * std::max(a[i], b[i]));
  }
}

TEST_CASE("weighted transform integrals over adjoint shells") {
  const DilationPtr d = line2();
  {
    // constant exponent: the two weight branches coincide identically
    const ExponentFunction p = ExponentFunction::constant(0.75);
    AtomicDecomposition decomp;
    decomp.coefficients = {Complex(1.0)};
    decomp.atoms = {line_atom(d, p, 0, 0, 41, 2048)};
    const VerificationReport rep = hardy_littlewood_integral(*d, p, decomp, -6, 6, 64);
    CHECK(rep.summary.pass);
    CHECK(all_rows_pass(rep, "branch_coincidence"));
    CHECK(all_rows_pass(rep, "decay_up"));
    CHECK(all_rows_pass(rep, "decay_down"));
    CHECK(all_rows_pass(rep, "widen_stability"));
    CHECK(all_rows_pass(rep, "rescale"));
    CHECK(std::isfinite(rep.summary.metrics.at("total_over_norm")));
  }
  {
    // variable exponent needs p_+ <= 1
    const ExponentFunction p = ExponentFunction::log_perturbed(0.7, 0.1, d);
    AtomicDecomposition decomp;
    decomp.coefficients = {Complex(0.5, 0.5)};
    decomp.atoms = {line_atom(d, p, 1, min_moment_order(p, *d), 43, 2048)};
    const VerificationReport rep = hardy_littlewood_integral(*d, p, decomp, -6, 6, 64);
    CHECK(rep.summary.pass);
  }
}

TEST_CASE("radial maximal function and the norm proxy") {
  const DilationPtr d = rot2();
  const ExponentFunction p = ExponentFunction::constant(0.9);
  GridSpec g;
  g.dimension = 2;
  g.half_width = 1.05 * (d->ball_bounding_radius(4) + d->ball_bounding_radius(0));
  g.resolution = 192;
  const SampledFunction phi = default_bump(*d, g);
  CHECK(std::abs(phi.integrate() - Complex(1.0)) <= 1e-12);

  // the supremum dominates the single-scale term phi * phi
  const SampledFunction m_phi = radial_maximal(phi, phi, *d, -2, 3);
  const SampledFunction conv = convolve(phi, phi);
  double violation = 0.0;
  for (size_t i = 0; i < conv.values().size(); ++i) {
    violation = std::max(violation, std::abs(conv.values()[i]) - m_phi.values()[i].real());
  }
  CHECK(violation <= 1e-12);

  const Atom atom =
      make_atom(*d, p, AtomRecipe{Ball{Vector::Zero(2), 0}, 2.0, -1, 47}, g);
  const SampledFunction narrow = radial_maximal(atom.samples, phi, *d, -1, 1);
  const SampledFunction wide = radial_maximal(atom.samples, phi, *d, -2, 3);
  violation = 0.0;
  for (size_t i = 0; i < narrow.values().size(); ++i) {
    violation = std::max(violation, narrow.values()[i].real() - wide.values()[i].real());
  }
  CHECK(violation <= 1e-12);

  // decay in the quasi-norm: three shells out never beats shell zero
  auto probe = [&](int shell) {
    double best = 0.0;
    for (const Vector& u : scan_directions(2, 8)) {
      const double t =
          std::sqrt(d->boundary_radius(u, shell) * d->boundary_radius(u, shell + 1));
      const Vector x = t * u;
      const GridSpec& gg = wide.grid();
      std::int64_t flat = 0;
      for (int dd = 0; dd < 2; ++dd) {
        const double uu = (x(dd) + gg.half_width) / gg.spacing() - 0.5;
        flat = flat * gg.resolution +
               std::clamp<std::int64_t>(std::llround(uu), 0, gg.resolution - 1);
      }
      best = std::max(best, wide.values()[static_cast<size_t>(flat)].real());
    }
    return best;
  };
  CHECK(probe(3) <= probe(0));

  const double proxy = hardy_norm_proxy(atom.samples, phi, *d, p, -1, 1);
  CHECK(proxy > 0.0);
  CHECK(std::isfinite(proxy));
  // widening the truncation can only increase the proxy
  const double proxy_wide = hardy_norm_proxy(atom.samples, phi, *d, p, -2, 3);
  CHECK(proxy_wide >= proxy * (1.0 - 1e-9));

  CHECK_THROWS_AS((void)radial_maximal(atom.samples, SampledFunction::zeros(g), *d, 0, 1),
                  Error);
}

TEST_CASE("coefficient aggregates are t-subadditive") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> mag(-3.0, 3.0);
  std::uniform_real_distribution<double> td(0.1, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Complex> v(8);
    double l1 = 0.0;
    for (Complex& c : v) {
      c = Complex(std::pow(10.0, mag(rng)), 0.0);
      l1 += std::abs(c);
    }
    const double t = td(rng);
    // (sum |c|)^t <= sum |c|^t, i.e. the t-aggregate dominates the plain sum
    CHECK(lp_quasi_norm(v, t) >= l1 * (1.0 - 1e-12));
  }
}

}  // TEST_SUITE
