#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "aniso/dilation.hpp"
#include "aniso/linalg.hpp"

namespace aniso {

using Complex = std::complex<double>;

/// Uniform midpoint-rule grid on [-L, L]^n: node_j = -L + (j + 1/2) h per
/// axis, h = 2L/m, quadrature weight h^n everywhere.
struct GridSpec {
  int dimension = 1;
  double half_width = 1.0;
  int resolution = 64;  // nodes per axis

  double spacing() const { return 2.0 * half_width / resolution; }
  std::int64_t size() const {
    std::int64_t s = 1;
    for (int d = 0; d < dimension; ++d) s *= resolution;
    return s;
  }
  double axis_node(int idx) const { return -half_width + (idx + 0.5) * spacing(); }

  bool operator==(const GridSpec& o) const {
    return dimension == o.dimension && half_width == o.half_width &&
           resolution == o.resolution;
  }
};

/// Index box [lo, hi) per axis, used to restrict loops to a support region.
struct IndexBox {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};
  bool empty(int n) const {
    for (int d = 0; d < n; ++d)
      if (lo[d] >= hi[d]) return true;
    return false;
  }
};

class SampledFunction {
 public:
  SampledFunction(GridSpec grid, std::vector<Complex> values,
                  std::optional<Ball> support_hint = std::nullopt);

  static SampledFunction zeros(const GridSpec& grid);

  template <class Fn>
  static SampledFunction sample(const GridSpec& grid, Fn&& fn,
                                std::optional<Ball> support_hint = std::nullopt) {
    std::vector<Complex> vals(static_cast<size_t>(grid.size()));
    const std::int64_t total = grid.size();
    Vector x(grid.dimension);
    for (std::int64_t flat = 0; flat < total; ++flat) {
      decode_node(grid, flat, x);
      vals[static_cast<size_t>(flat)] = Complex(fn(x));
    }
    return SampledFunction(grid, std::move(vals), std::move(support_hint));
  }

  const GridSpec& grid() const { return grid_; }
  const std::vector<Complex>& values() const { return values_; }
  const std::optional<Ball>& support_hint() const { return hint_; }

  Vector node(std::int64_t flat) const;
  static void decode_node(const GridSpec& grid, std::int64_t flat, Vector& out);

  /// h^n * sum of values, deterministic pairwise reduction.
  Complex integrate() const;

  /// h^n * sum of weight(node) * value.
  template <class Fn>
  Complex integrate_weighted(Fn&& weight) const {
    const double hn = cell_volume();
    Vector x(grid_.dimension);
    Complex acc = pairwise_reduce<Complex>(
        0, static_cast<std::int64_t>(values_.size()), [&](std::int64_t i) {
          decode_node(grid_, i, x);
          return Complex(weight(x)) * values_[static_cast<size_t>(i)];
        });
    return hn * acc;
  }

  double cell_volume() const;

  /// Multilinear interpolation; zero outside the grid.
  Complex interpolate(const Vector& x) const;

  double max_abs() const;
  bool is_zero() const;

  /// Smallest index box containing all nonzero values (whole grid if the
  /// function has full support).
  IndexBox support_box() const;

  SampledFunction& scale(Complex factor);

 private:
  GridSpec grid_;
  std::vector<Complex> values_;
  std::optional<Ball> hint_;
};

/// Quadrature of f(x) e^{-2 pi i x.xi} over the grid. Direct summation with
/// per-axis phase tables; cost O(support size) per frequency.
Complex dft_at(const SampledFunction& f, const Vector& xi);

/// Frequencies above this see fewer than ~4 nodes per oscillation period and
/// the quadrature is flagged as alias-risky (warning-level, not fatal).
double dft_alias_guard(const GridSpec& grid);
bool dft_alias_risk(const GridSpec& grid, const Vector& xi);

/// x -> f(A^k x), resampled on `target` (same grid when omitted) via
/// multilinear interpolation. Throws SupportOverflow when A^-k(support f)
/// does not fit in the target box.
SampledFunction dilate_samples(const SampledFunction& f, const DilationStructure& d, int k);
SampledFunction dilate_samples(const SampledFunction& f, const DilationStructure& d, int k,
                               const GridSpec& target);

/// Discrete convolution scaled by h^n, evaluated on the common grid. The
/// kernel is read at node differences, which land on cell corners; corner
/// values are the average of the adjacent nodes. Throws GridMismatch /
/// SupportOverflow per the preconditions.
SampledFunction convolve(const SampledFunction& f, const SampledFunction& g);

/// Indicator of x0 + B_k rasterized on the grid.
SampledFunction rasterize_ball(const DilationStructure& d, const Ball& ball,
                               const GridSpec& grid);

/// Grid box sized to cover x0 + B_k with the given padding factor. The box is
/// centered at the origin, so it must cover the ball wherever it sits.
GridSpec cover_ball(const DilationStructure& d, const Ball& ball, double padding,
                    int resolution);

/// CSV dump: one row per node, coordinates then real and imaginary parts.
void write_samples_csv(const std::string& path, const SampledFunction& f);

}  // namespace aniso
