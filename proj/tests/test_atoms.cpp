#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "aniso/atoms.hpp"
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

}  // namespace

TEST_SUITE("atoms") {

TEST_CASE("admissible moment order") {
  // p_- = 1 always admits s = 0
  CHECK(min_moment_order(ExponentFunction::constant(1.0), *rot2()) == 0);

  {
    // isotropic doubling with exact lambda: (1/p - 1) ln b / ln lambda = 2
    Matrix m(2, 2);
    m << 2, 0, 0, 2;
    DilationOptions opts;
    opts.lambda_minus = 2.0;
    opts.lambda_plus = 2.0;
    const DilationPtr d = DilationStructure::make(m, opts);
    CHECK(min_moment_order(ExponentFunction::constant(0.5), *d) == 2);
    // (1/(2/3) - 1) * ln4 / ln2 = 1
    CHECK(min_moment_order(ExponentFunction::constant(2.0 / 3.0), *d) == 1);
  }

  // 5x5 grid: nonincreasing in p_-, nondecreasing in ln b / ln lambda_-
  {
    std::vector<DilationPtr> dils;
    for (int n : {1, 2, 3}) {
      DilationOptions opts;
      opts.lambda_minus = 2.0;
      opts.lambda_plus = 2.0;
      dils.push_back(DilationStructure::make(2.0 * Matrix::Identity(n, n), opts));
    }
    {
      DilationOptions opts;
      opts.lambda_minus = 1.5;  // widens ln b / ln lambda beyond the n = 3 case
      Matrix m = 2.0 * Matrix::Identity(2, 2);
      dils.push_back(DilationStructure::make(m, opts));
      Matrix m3 = 2.0 * Matrix::Identity(3, 3);
      dils.push_back(DilationStructure::make(m3, opts));
    }
    // sort by the ratio ln b / ln lambda_-
    std::sort(dils.begin(), dils.end(), [](const DilationPtr& a, const DilationPtr& b) {
      return std::log(a->det_factor()) / std::log(a->lambda_minus()) <
             std::log(b->det_factor()) / std::log(b->lambda_minus());
    });
    const std::array<double, 5> ps = {0.35, 0.5, 0.65, 0.8, 0.95};
    for (size_t di = 0; di < dils.size(); ++di) {
      int prev_p = 1 << 20;
      for (size_t pi = 0; pi < ps.size(); ++pi) {
        const int s = min_moment_order(ExponentFunction::constant(ps[pi]), *dils[di]);
        CHECK(s <= prev_p);  // nonincreasing in p_-
        prev_p = s;
        if (di > 0) {
          const int s_smaller_ratio =
              min_moment_order(ExponentFunction::constant(ps[pi]), *dils[di - 1]);
          CHECK(s >= s_smaller_ratio);  // nondecreasing in ln b / ln lambda_-
        }
      }
    }
  }
}

TEST_CASE("atom construction meets all three conditions") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::constant(1.0);
  const GridSpec g = grid1(4.0, 2048);
  for (int k0 : {-2, 0, 2}) {
    for (int s : {0, 1, 2}) {
      for (double r : {2.0, std::numeric_limits<double>::infinity()}) {
        AtomRecipe recipe{Ball{Vector::Zero(1), k0}, r, s, 99};
        const Atom atom = make_atom(*d, p, recipe, g);
        const AtomValidation v = validate_atom(*d, p, atom);
        CHECK(v.support_ok);
        CHECK(v.size_ok);
        CHECK(v.moments_ok);
        CHECK(v.size_ratio == doctest::Approx(1.0).epsilon(1e-6));  // scaled to equality
        CHECK(atom.max_moment_residual() <= 1e-8 * atom.l1_norm);
      }
    }
  }
}

TEST_CASE("atom transform vanishes at the origin; next moment survives") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::constant(0.8);
  const GridSpec g = grid1(3.0, 2048);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    AtomRecipe recipe{Ball{Vector::Zero(1), 0}, 2.0, 1, seed};
    const Atom atom = make_atom(*d, p, recipe, g);
    CHECK(std::abs(atom.samples.integrate()) <= 1e-8 * atom.l1_norm);
    // degree s+1 moment is generically alive
    const Complex top = atom.samples.integrate_weighted(
        [](const Vector& x) { return x(0) * x(0); });
    CHECK(std::abs(top) > 1e-3 * atom.l1_norm);
  }
}

TEST_CASE("atom grid must resolve the ball") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::constant(1.0);
  // ball of length 1/16 against h = 1/8: the moment system cannot be formed
  AtomRecipe recipe{Ball{Vector::Zero(1), -4}, 2.0, 2, 5};
  CHECK_THROWS_AS((void)make_atom(*d, p, recipe, grid1(4.0, 64)), Error);
}

TEST_CASE("moment order below the admissible minimum is rejected") {
  Matrix m(2, 2);
  m << 2, 0, 0, 2;
  DilationOptions opts;
  opts.lambda_minus = 2.0;
  const DilationPtr d = DilationStructure::make(m, opts);
  const ExponentFunction p = ExponentFunction::constant(0.5);  // s_min = 2
  GridSpec g;
  g.dimension = 2;
  g.half_width = 1.0;
  g.resolution = 128;
  AtomRecipe recipe{Ball{Vector::Zero(2), 0}, 2.0, 1, 3};
  CHECK_THROWS_WITH_AS((void)make_atom(*d, p, recipe, g), doctest::Contains("ConfigError"),
                       Error);
}

TEST_CASE("aggregated coefficient norm") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::constant(1.0);
  const GridSpec g = grid1(4.0, 2048);
  AtomRecipe recipe{Ball{Vector::Zero(1), 0}, 2.0, 0, 11};
  const Atom atom = make_atom(*d, p, recipe, g);

  AtomicDecomposition single;
  single.coefficients = {Complex(1.0)};
  single.atoms = {atom};
  CHECK(atomic_norm_expression(p, *d, single, g) == doctest::Approx(1.0).epsilon(1e-4));

  // positive homogeneity in the coefficients
  AtomicDecomposition scaled = single;
  scaled.coefficients = {Complex(7.0)};
  CHECK(atomic_norm_expression(p, *d, scaled, g) == doctest::Approx(7.0).epsilon(1e-4));

  // two disjoint unit balls with p = 1: the aggregate is additive
  AtomRecipe left{Ball{Vector::Constant(1, -1.0), 0}, 2.0, 0, 12};
  AtomRecipe right{Ball{Vector::Constant(1, 1.0), 0}, 2.0, 0, 13};
  AtomicDecomposition pair;
  pair.coefficients = {Complex(1.0), Complex(1.0)};
  pair.atoms = {make_atom(*d, p, left, g), make_atom(*d, p, right, g)};
  CHECK(atomic_norm_expression(p, *d, pair, g) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("coefficient sum against the aggregated norm") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::log_perturbed(0.7, 0.1, d);
  const GridSpec g = grid1(6.0, 2048);

  AtomRecipe recipe{Ball{Vector::Zero(1), 0}, 2.0, -1, 21};
  const Atom atom = make_atom(*d, p, recipe, g);
  AtomicDecomposition single;
  single.coefficients = {Complex(1.0)};
  single.atoms = {atom};
  const CoefficientSumResult one = coefficient_sum_check(p, *d, single, g);
  CHECK(one.holds);
  CHECK(std::abs(one.coefficient_sum - one.norm_expression) <= 1e-4);

  AtomicDecomposition zero = single;
  zero.coefficients = {Complex(0.0)};
  const CoefficientSumResult z = coefficient_sum_check(p, *d, zero, g);
  CHECK(z.holds);
  CHECK(z.coefficient_sum == 0.0);
  CHECK(z.norm_expression == 0.0);

  // randomized decompositions: the inequality must always hold
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> mag(-3.0, 3.0);
  std::uniform_int_distribution<int> kd(-2, 2);
  std::uniform_real_distribution<double> center(-2.0, 2.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 30; ++trial) {
    AtomicDecomposition decomp;
    for (int i = 0; i < 5; ++i) {
      AtomRecipe rc{Ball{Vector::Constant(1, center(rng)), kd(rng)}, 2.0, -1,
                    1000 + static_cast<std::uint64_t>(trial) * 16 + i};
      decomp.atoms.push_back(make_atom(*d, p, rc, g));
      const double c = std::pow(10.0, mag(rng));
      const double th = phase(rng);
      decomp.coefficients.push_back(c * Complex(std::cos(th), std::sin(th)));
    }
    CHECK(coefficient_sum_check(p, *d, decomp, g).holds);
  }
}

TEST_CASE("synthesis of finite decompositions") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::constant(1.0);
  const GridSpec g = grid1(4.0, 1024);
  AtomRecipe recipe{Ball{Vector::Zero(1), 0}, 2.0, 0, 41};
  const Atom atom = make_atom(*d, p, recipe, g);

  AtomicDecomposition single;
  single.coefficients = {Complex(1.0)};
  single.atoms = {atom};
  const SampledFunction s1 = synthesize(single);
  double gap = 0.0;
  for (size_t i = 0; i < s1.values().size(); ++i) {
    gap = std::max(gap, std::abs(s1.values()[i] - atom.samples.values()[i]));
  }
  CHECK(gap == 0.0);

  AtomicDecomposition cancel;
  cancel.coefficients = {Complex(1.0), Complex(-1.0)};
  cancel.atoms = {atom, atom};
  CHECK(synthesize(cancel).max_abs() == 0.0);

  // mean vanishes because every atom has a vanishing zeroth moment
  AtomicDecomposition mixed;
  mixed.coefficients = {Complex(2.0), Complex(0.0, 1.0)};
  mixed.atoms = {atom, make_atom(*d, p, AtomRecipe{Ball{Vector::Zero(1), 1}, 2.0, 0, 42}, g)};
  double mass = 0.0;
  for (size_t i = 0; i < mixed.atoms.size(); ++i) {
    mass += std::abs(mixed.coefficients[i]) * mixed.atoms[i].l1_norm;
  }
  CHECK(std::abs(synthesize(mixed).integrate()) <= 1e-8 * mass);

  // atoms on different grids cannot be synthesized
  AtomicDecomposition bad;
  bad.coefficients = {Complex(1.0), Complex(1.0)};
  bad.atoms = {atom, make_atom(*d, p, recipe, grid1(4.0, 512))};
  CHECK_THROWS_WITH_AS((void)synthesize(bad), doctest::Contains("GridMismatch"), Error);
}

TEST_CASE("atom dump round trip") {
  const DilationPtr d = line2();
  const ExponentFunction p = ExponentFunction::constant(1.0);
  const GridSpec g = grid1(2.0, 256);
  const Atom atom = make_atom(*d, p, AtomRecipe{Ball{Vector::Zero(1), 0}, 2.0, 0, 51}, g);

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "aniso_atom_dump";
  fs::create_directories(dir);
  dump_atom((dir / "a.csv").string(), (dir / "a.json").string(), atom);

  std::ifstream jf(dir / "a.json");
  REQUIRE(jf.good());
  nlohmann::json j;
  jf >> j;
  CHECK(j["ball"]["scale"].get<int>() == 0);
  CHECK(j["s"].get<int>() == 0);
  CHECK(j["r"].get<double>() == 2.0);
  CHECK(j["moment_residuals"].size() == 1);

  std::ifstream cf(dir / "a.csv");
  REQUIRE(cf.good());
  std::string header;
  std::getline(cf, header);
  CHECK(header == "x0,re,im");
  fs::remove_all(dir);
}

}  // TEST_SUITE
