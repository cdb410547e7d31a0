#include <doctest.h>

#include <cmath>
#include <random>

#include "aniso/errors.hpp"
#include "aniso/sampling.hpp"

using namespace aniso;

namespace {

DilationPtr iso2() {
  Matrix m(2, 2);
  m << 2, 0, 0, 2;
  return DilationStructure::make(m);
}

GridSpec grid1(double half, int m) {
  GridSpec g;
  g.dimension = 1;
  g.half_width = half;
  g.resolution = m;
  return g;
}

double gauss_like(double t) {
  return std::abs(t) < 0.9 ? std::exp(-8.0 * t * t) - std::exp(-8.0 * 0.81) : 0.0;
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("integrate: constants exact, odd functions cancel") {
  const GridSpec g = grid1(1.0, 512);
  const SampledFunction one = SampledFunction::sample(g, [](const Vector&) { return 1.0; });
  CHECK(one.integrate().real() == doctest::Approx(2.0).epsilon(1e-15));

  const SampledFunction odd = SampledFunction::sample(g, [](const Vector& x) { return x(0); });
  CHECK(std::abs(odd.integrate()) <= 1e-15);  // symmetric pairwise tree
}

TEST_CASE("integrate: refinement study") {
  auto bump = [](const Vector& x) { return gauss_like(x(0)); };
  const double coarse =
      SampledFunction::sample(grid1(1.5, 512), bump).integrate().real();
  const double fine =
      SampledFunction::sample(grid1(1.5, 1024), bump).integrate().real();
  CHECK(std::abs(fine - coarse) / std::abs(fine) < 1e-6);
}

TEST_CASE("dft: sinc oracle and exact symmetries") {
  const GridSpec g = grid1(1.0, 512);
  const SampledFunction ind = SampledFunction::sample(
      g, [](const Vector& x) { return std::abs(x(0)) < 0.5 ? 1.0 : 0.0; });
  Vector xi(1);
  xi << 0.0;
  CHECK(dft_at(ind, xi).real() == doctest::Approx(1.0).epsilon(1e-12));
  xi << 1.0;
  CHECK(std::abs(dft_at(ind, xi)) <= 1e-6);
  xi << 0.5;
  CHECK(dft_at(ind, xi).real() ==
        doctest::Approx(std::sin(M_PI * 0.5) / (M_PI * 0.5)).epsilon(1e-5));

  // conjugate symmetry is exact for real samples
  const SampledFunction f = SampledFunction::sample(g, [](const Vector& x) {
    return gauss_like(x(0) - 0.2);
  });
  for (double w : {0.3, 1.7, 9.0}) {
    Vector plus(1), minus(1);
    plus << w;
    minus << -w;
    const Complex a = dft_at(f, plus);
    const Complex b = dft_at(f, minus);
    CHECK(a.real() == b.real());
    CHECK(a.imag() == -b.imag());
  }
}

TEST_CASE("dft: modulus invariant under grid shifts") {
  const GridSpec g = grid1(2.0, 1024);
  const double h = g.spacing();
  auto base = [](double t) { return gauss_like(t); };
  const SampledFunction f = SampledFunction::sample(g, [&](const Vector& x) {
    return base(x(0));
  });
  const SampledFunction shifted = SampledFunction::sample(g, [&](const Vector& x) {
    return base(x(0) - 16 * h);
  });
  for (double w : {0.5, 2.0, 11.0}) {
    Vector xi(1);
    xi << w;
    CHECK(std::abs(dft_at(f, xi)) ==
          doctest::Approx(std::abs(dft_at(shifted, xi))).epsilon(1e-11));
  }
}

TEST_CASE("dft: linearity and alias guard") {
  const GridSpec g = grid1(1.0, 256);
  const SampledFunction f = SampledFunction::sample(g, [](const Vector& x) {
    return gauss_like(x(0));
  });
  const SampledFunction gfun = SampledFunction::sample(g, [](const Vector& x) {
    return x(0) * gauss_like(x(0) + 0.1);
  });
  std::vector<Complex> sum(f.values().size());
  for (size_t i = 0; i < sum.size(); ++i) sum[i] = f.values()[i] + gfun.values()[i];
  const SampledFunction fg(g, std::move(sum));
  Vector xi(1);
  xi << 3.0;
  const Complex lhs = dft_at(fg, xi);
  const Complex rhs = dft_at(f, xi) + dft_at(gfun, xi);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));

  CHECK_FALSE(dft_alias_risk(g, xi));
  xi << 0.9 * dft_alias_guard(g);
  CHECK_FALSE(dft_alias_risk(g, xi));
  xi << 1.1 * dft_alias_guard(g);
  CHECK(dft_alias_risk(g, xi));
}

TEST_CASE("grid-level Parseval identity") {
  const GridSpec g = grid1(1.0, 256);
  const SampledFunction f = SampledFunction::sample(g, [](const Vector& x) {
    return gauss_like(x(0)) * (1.0 + 0.5 * std::sin(3.0 * x(0)));
  });
  double space_side = 0.0;
  for (const Complex& v : f.values()) space_side += std::norm(v);
  space_side *= f.cell_volume();

  // dual lattice t/(2L), t = -m/2 .. m/2-1
  double freq_side = 0.0;
  for (int t = -g.resolution / 2; t < g.resolution / 2; ++t) {
    Vector xi(1);
    xi << t / (2.0 * g.half_width);
    freq_side += std::norm(dft_at(f, xi));
  }
  freq_side /= 2.0 * g.half_width;
  CHECK(freq_side == doctest::Approx(space_side).epsilon(1e-9));
}

TEST_CASE("dilate_samples: identity, disk area, change of variables") {
  const DilationPtr d = iso2();
  GridSpec g;
  g.dimension = 2;
  g.half_width = 0.7;
  g.resolution = 1024;
  const SampledFunction disk = rasterize_ball(*d, Ball{Vector::Zero(2), 0}, g);

  // k = 0 reproduces node values exactly
  const SampledFunction same = dilate_samples(disk, *d, 0);
  double gap = 0.0;
  for (size_t i = 0; i < same.values().size(); ++i) {
    gap = std::max(gap, std::abs(same.values()[i] - disk.values()[i]));
  }
  CHECK(gap == 0.0);

  // x -> f(Ax) shrinks the unit-volume disk to area 1/4
  const SampledFunction small = dilate_samples(disk, *d, 1);
  CHECK(small.integrate().real() == doctest::Approx(0.25).epsilon(1e-3));

  // smooth change of variables at several scales
  GridSpec gs;
  gs.dimension = 2;
  gs.half_width = 3.0;
  gs.resolution = 192;
  const SampledFunction bump = SampledFunction::sample(gs, [](const Vector& x) {
    const double q = (x(0) * x(0) + x(1) * x(1)) / 0.4;
    return q < 1.0 ? std::pow(1.0 - q, 4.0) : 0.0;
  });
  const double mass = bump.integrate().real();
  for (int k = -2; k <= 2; ++k) {
    const SampledFunction dil = dilate_samples(bump, *d, k);
    const double lhs = dil.integrate().real() * d->ball_volume(k);
    CHECK(lhs == doctest::Approx(mass).epsilon(1e-3));
  }

  // support escaping the box is an error
  GridSpec tight;
  tight.dimension = 2;
  tight.half_width = 1.0;
  tight.resolution = 64;
  CHECK_THROWS_WITH_AS((void)dilate_samples(bump, *d, -2, tight),
                       doctest::Contains("SupportOverflow"), Error);
  // mismatched dimension
  CHECK_THROWS_WITH_AS((void)dilate_samples(bump, *d, 0, grid1(1.0, 64)),
                       doctest::Contains("GridMismatch"), Error);
}

TEST_CASE("convolve: identity element, commutativity, triangle oracle") {
  const GridSpec g = grid1(2.0, 4096);
  const double h = g.spacing();

  const SampledFunction f = SampledFunction::sample(g, [](const Vector& x) {
    return gauss_like(x(0));
  });
  // single node of mass 1/h at the node nearest the origin
  std::vector<Complex> spike(f.values().size());
  spike[static_cast<size_t>(g.resolution / 2)] = Complex(1.0 / h);
  const SampledFunction delta(g, std::move(spike));
  const SampledFunction approx = convolve(f, delta);
  double worst = 0.0;
  for (size_t i = 0; i < approx.values().size(); ++i) {
    worst = std::max(worst, std::abs(approx.values()[i] - f.values()[i]));
  }
  CHECK(worst <= 3.0 * h);  // half-cell smear of a unit-slope profile

  const SampledFunction ind = SampledFunction::sample(g, [](const Vector& x) {
    return x(0) >= 0.0 && x(0) < 1.0 ? 1.0 : 0.0;
  });
  const SampledFunction tri = convolve(ind, ind);
  // triangle peak value 1 at x = 1
  Vector at(1);
  at << 1.0 - h / 2.0;
  const double u = (at(0) + g.half_width) / h - 0.5;
  const double peak = tri.values()[static_cast<size_t>(std::lround(u))].real();
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-3));

  const SampledFunction ab = convolve(ind, f);
  const SampledFunction ba = convolve(f, ind);
  double gap = 0.0;
  for (size_t i = 0; i < ab.values().size(); ++i) {
    gap = std::max(gap, std::abs(ab.values()[i] - ba.values()[i]));
  }
  CHECK(gap <= 1e-12);

  // supports too wide to fit
  const SampledFunction wide = SampledFunction::sample(g, [](const Vector& x) {
    return std::abs(x(0)) < 1.6 ? 1.0 : 0.0;
  });
  CHECK_THROWS_WITH_AS((void)convolve(wide, wide), doctest::Contains("SupportOverflow"),
                       Error);
  CHECK_THROWS_WITH_AS((void)convolve(f, SampledFunction::zeros(grid1(2.0, 2048))),
                       doctest::Contains("GridMismatch"), Error);
}

TEST_CASE("support hints transform under dilation") {
  const DilationPtr d = iso2();
  GridSpec g;
  g.dimension = 2;
  g.half_width = 1.0;
  g.resolution = 128;
  const SampledFunction disk = rasterize_ball(*d, Ball{Vector::Zero(2), 0}, g);
  REQUIRE(disk.support_hint().has_value());
  const SampledFunction dil = dilate_samples(disk, *d, 1);
  REQUIRE(dil.support_hint().has_value());
  CHECK(dil.support_hint()->scale == -1);
}

}  // TEST_SUITE
