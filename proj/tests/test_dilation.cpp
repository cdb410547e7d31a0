#include <doctest.h>

#include <cmath>
#include <random>

#include "aniso/dilation.hpp"
#include "aniso/errors.hpp"

using namespace aniso;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Matrix scalar(double v) {
  Matrix m(1, 1);
  m << v;
  return m;
}

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST_SUITE("dilation") {

TEST_CASE("spectrum closed forms") {
  {
    const SpectrumInfo s = spectrum(mat2(2, 0, 0, 2));
    CHECK(s.moduli[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s.moduli[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s.abs_det == doctest::Approx(4.0).epsilon(1e-14));
  }
  {
    // complex pair with modulus sqrt(2)
    const SpectrumInfo s = spectrum(mat2(0, -2, 1, 0));
    CHECK(s.moduli[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(s.moduli[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(s.abs_det == doctest::Approx(2.0).epsilon(1e-14));
  }
  {
    const SpectrumInfo s = spectrum(scalar(-2.5));
    CHECK(s.moduli[0] == doctest::Approx(2.5));
    CHECK(s.abs_det == doctest::Approx(2.5));
  }
  {
    Matrix m(3, 3);
    m << 0, -2, 0, 1, 0, 0, 0, 0, 3;
    const SpectrumInfo s = spectrum(m);
    CHECK(s.moduli[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s.moduli[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s.moduli[2] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s.abs_det == doctest::Approx(6.0).epsilon(1e-12));
  }
  {
    Matrix m(3, 3);
    m << 2, 1, 0, 0, 3, 1, 0, 0, 4;
    const SpectrumInfo s = spectrum(m);
    CHECK(s.moduli[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(s.moduli[1] == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(s.moduli[2] == doctest::Approx(4.0).epsilon(1e-10));
  }
  CHECK_THROWS_WITH_AS(spectrum(mat2(1, 1, 0, 1)), doctest::Contains("NotExpansive"), Error);
  CHECK_THROWS_WITH_AS(spectrum(mat2(1, 1, 1, 1)), doctest::Contains("SingularMatrix"), Error);
}

TEST_CASE("ellipsoid construction oracles") {
  {
    // isotropic doubling: unit-volume disk, expansion factor 2
    const DilationPtr d = DilationStructure::make(mat2(2, 0, 0, 2));
    const Ellipsoid& e = d->unit_ellipsoid();
    CHECK((e.form - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(e.level == doctest::Approx(1.0 / M_PI).epsilon(1e-12));
    CHECK(d->expansion_factor() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(d->tau() == 1);
    CHECK(d->det_factor() == doctest::Approx(4.0));
  }
  {
    // n = 1, A = 3: Delta = (-1/2, 1/2), r = 3
    const DilationPtr d = DilationStructure::make(scalar(3));
    CHECK(d->unit_ellipsoid().level == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(d->unit_ellipsoid().form(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d->expansion_factor() == doctest::Approx(3.0).epsilon(1e-9));
    Vector u(1);
    u << 1.0;
    CHECK(d->boundary_radius(u, 0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  {
    // tau for a slow expansion: 1.3^2 < 2 <= 1.3^3
    const DilationPtr d = DilationStructure::make(mat2(1.3, 0, 0, 1.3));
    CHECK(d->expansion_factor() == doctest::Approx(1.3).epsilon(1e-9));
    CHECK(d->tau() == 3);
  }
}

TEST_CASE("containment r*Delta inside A*Delta") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const std::vector<Matrix> mats = {mat2(2, 0, 0, 2), mat2(0, -2, 1, 0), mat2(2, 0.7, 0, 3),
                                    mat2(1.2, 0.3, -0.2, 1.5)};
  for (const Matrix& a : mats) {
    const DilationPtr d = DilationStructure::make(a);
    const double r = d->expansion_factor();
    REQUIRE(r > 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      Vector u = vec2(uni(rng), uni(rng));
      if (u.norm() < 1e-6) continue;
      const double t0 = d->boundary_radius(u, 0);
      const double t1 = d->boundary_radius(u, 1);
      CHECK(r * t0 <= t1 * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("step quasi-norm disk values") {
  const DilationPtr d = DilationStructure::make(mat2(2, 0, 0, 2));
  CHECK(d->quasi_norm(vec2(0.4, 0.0)) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(d->quasi_norm(vec2(0.8, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d->quasi_norm(Vector::Zero(2)) == 0.0);
  // disk radii 0.5642, 0.2821
  CHECK(d->boundary_radius(vec2(1, 0), 0) == doctest::Approx(0.5641895835).epsilon(1e-9));
  CHECK(d->boundary_radius(vec2(1, 0), -1) == doctest::Approx(0.2820947918).epsilon(1e-9));
  // boundary belongs to the outer shell
  const double t = d->boundary_radius(vec2(1, 0), 0);
  CHECK(d->quasi_norm(vec2(t * (1.0 + 1e-9), 0.0)) == 1.0);
  CHECK(d->quasi_norm(vec2(t * (1.0 - 1e-9), 0.0)) == 0.25);
}

TEST_CASE("homogeneity is exact in the shell index") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-4.0, 4.0);
  for (const Matrix& a : {mat2(2, 0, 0, 3), mat2(0, -2, 1, 0)}) {
    const DilationPtr d = DilationStructure::make(a);
    const double b = d->det_factor();
    for (int trial = 0; trial < 200; ++trial) {
      Vector x = vec2(uni(rng), uni(rng));
      if (x.norm() < 1e-9) continue;
      const int base = d->shell_index(x);
      for (int k = -4; k <= 4; ++k) {
        const Vector y = d->apply_power(x, k);
        CHECK(d->shell_index(y) == base + k);
        // same helper, same integer, bit-identical value
        CHECK(d->quasi_norm(y) == power_int(b, base + k));
      }
    }
  }
}

TEST_CASE("quasi-triangle constant is finite and stable") {
  const DilationPtr d = DilationStructure::make(mat2(0, -2, 1, 0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  double c_half = 0.0, c_full = 0.0;
  const int pairs = 10000;
  for (int i = 0; i < pairs; ++i) {
    const Vector x = vec2(uni(rng), uni(rng));
    const Vector y = vec2(uni(rng), uni(rng));
    const double denom = d->quasi_norm(x) + d->quasi_norm(y);
    if (denom == 0.0) continue;
    const double c = d->quasi_norm(x + y) / denom;
    c_full = std::max(c_full, c);
    if (i < pairs / 2) c_half = std::max(c_half, c);
  }
  CHECK(c_full >= 1.0);  // attained near x = y
  CHECK(std::isfinite(c_full));
  CHECK(c_full <= 1.1 * c_half);
}

TEST_CASE("nesting on boundary-adjacent samples") {
  const DilationPtr d = DilationStructure::make(mat2(2, 0.5, 0, 3));
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double r = d->expansion_factor();
  for (int i = -2; i <= 2; ++i) {
    for (int trial = 0; trial < 200; ++trial) {
      Vector u = vec2(uni(rng), uni(rng));
      if (u.norm() < 1e-6) continue;
      const Vector x = (1.0 - 1e-7) * d->boundary_radius(u, i) * u;
      REQUIRE(d->in_ball(x, i));
      CHECK(d->in_ball(x / r, i));      // B_i inside r B_i
      CHECK(d->in_ball(r * x, i + 1));  // r B_i inside B_{i+1}
    }
  }
}

TEST_CASE("volume of Delta via stratified sampling") {
  const DilationPtr d = DilationStructure::make(mat2(2, 1, 0, 3));
  const Vector half = d->ball_bounding_box(0);
  const double box = 4.0 * half(0) * half(1);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> jit(0.0, 1.0);
  const int g = 400;
  long hits = 0;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const Vector x = vec2(-half(0) + (i + jit(rng)) * 2.0 * half(0) / g,
                            -half(1) + (j + jit(rng)) * 2.0 * half(1) / g);
      if (d->in_ball(x, 0)) ++hits;
    }
  }
  const double est = box * hits / double(g) / double(g);
  CHECK(est == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("adjoint shares b and eigenvalue bounds") {
  const DilationPtr d = DilationStructure::make(mat2(2, 1, 0, 3));
  const DilationPtr adj = d->adjoint();
  CHECK(adj->det_factor() == d->det_factor());
  CHECK(adj->eig_min() == doctest::Approx(d->eig_min()).epsilon(1e-12));
  CHECK(adj->eig_max() == doctest::Approx(d->eig_max()).epsilon(1e-12));
  CHECK((adj->matrix() - d->matrix().transpose()).cwiseAbs().maxCoeff() == 0.0);
  // adjoint quasi-norm has the same homogeneity
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = vec2(uni(rng), uni(rng));
    if (x.norm() < 1e-9) continue;
    const int base = adj->shell_index(x);
    for (int k = -3; k <= 3; ++k) {
      CHECK(adj->shell_index(adj->apply_power(x, k)) == base + k);
    }
  }
}

TEST_CASE("comparability band: isotropic oracle") {
  DilationOptions opts;
  opts.lambda_minus = 2.0;
  opts.lambda_plus = 2.0;
  const DilationPtr d = DilationStructure::make(mat2(2, 0, 0, 2), opts);

  std::vector<Vector> samples;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (int i = -3; i <= 3; ++i) {
    for (int trial = 0; trial < 60; ++trial) {
      const Vector u = vec2(std::cos(ang(rng)), std::sin(ang(rng)));
      const double lo = d->boundary_radius(u, i);
      const double hi = d->boundary_radius(u, i + 1);
      samples.push_back((lo * (1.0 + 1e-9)) * u);
      samples.push_back((hi * (1.0 - 1e-9)) * u);
    }
  }
  const ComparabilityBand band = comparability_band(*d, samples);
  CHECK(band.exp_minus == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(band.exp_plus == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(band.large_rho.c_high / band.large_rho.c_low <= 2.01);
  CHECK(band.large_rho.c_high / band.large_rho.c_low >= 1.9);
  CHECK(band.small_rho.c_high / band.small_rho.c_low <= 2.01);

  // the isotropic band is invariant under mapping all samples by A
  std::vector<Vector> mapped;
  for (const Vector& x : samples) mapped.push_back(d->apply_power(x, 1));
  const ComparabilityBand band2 = comparability_band(*d, mapped);
  CHECK(band2.large_rho.c_high == doctest::Approx(band.large_rho.c_high).epsilon(1e-9));
  CHECK(band2.large_rho.c_low == doctest::Approx(band.large_rho.c_low).epsilon(1e-9));
}

TEST_CASE("comparability band: anisotropic extremes finite") {
  const DilationPtr d = DilationStructure::make(mat2(2, 0, 0, 3));
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uni(-5.0, 5.0);
  std::vector<Vector> samples;
  for (int i = 0; i < 1000; ++i) {
    const Vector x = vec2(uni(rng), uni(rng));
    if (x.norm() > 1e-9) samples.push_back(x);
  }
  const ComparabilityBand band = comparability_band(*d, samples);
  CHECK(band.exp_minus < band.exp_plus);
  for (const RegimeBand* rb : {&band.small_rho, &band.large_rho}) {
    CHECK(rb->count > 0);
    CHECK(rb->c_low > 0.0);
    CHECK(std::isfinite(rb->c_high));
  }
}

TEST_CASE("comparability band: empty regime is an error") {
  const DilationPtr d = DilationStructure::make(mat2(2, 0, 0, 2));
  std::vector<Vector> inner = {vec2(0.1, 0.0), vec2(0.0, 0.2)};  // rho <= 1 only
  CHECK_THROWS_WITH_AS(comparability_band(*d, inner), doctest::Contains("EmptyRegime"), Error);
}

TEST_CASE("lambda overrides are validated") {
  DilationOptions bad;
  bad.lambda_minus = 2.5;  // above min |sigma|
  CHECK_THROWS_AS((void)DilationStructure::make(mat2(2, 0, 0, 3), bad), Error);
  DilationOptions good;
  good.lambda_minus = 1.5;
  good.lambda_plus = 3.5;
  const DilationPtr d = DilationStructure::make(mat2(2, 0, 0, 3), good);
  CHECK(d->lambda_minus() == 1.5);
  CHECK(d->lambda_plus() == 3.5);
}

TEST_CASE("n = 3 geometry") {
  Matrix m(3, 3);
  m << 2, 0, 0, 0, 0, -2, 0, 1, 0;
  const DilationPtr d = DilationStructure::make(m);
  CHECK(d->det_factor() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(d->expansion_factor() > 1.0);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector x(3);
    x << uni(rng), uni(rng), uni(rng);
    if (x.norm() < 1e-9) continue;
    const int base = d->shell_index(x);
    for (int k = -2; k <= 2; ++k) {
      CHECK(d->shell_index(d->apply_power(x, k)) == base + k);
    }
  }
}

}  // TEST_SUITE
