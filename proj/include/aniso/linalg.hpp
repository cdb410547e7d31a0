#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace aniso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Determinant by the closed 1x1/2x2/3x3 formulas (dimensions this library
/// supports); deterministic, no pivoting.
double det_small(const Matrix& a);

Matrix inverse_small(const Matrix& a);

/// Moduli of all eigenvalues via the characteristic polynomial (n <= 3).
/// Complex pairs contribute their modulus twice. Sorted ascending.
std::vector<double> eigen_moduli(const Matrix& a);

/// b^k by binary exponentiation. Two calls with the same (b, k) are
/// bit-identical, which is what the quasi-norm homogeneity contract needs.
double power_int(double base, int exponent);

/// Deterministic pairwise (balanced-tree) reduction of f(i) over [begin, end).
template <class T, class F>
T pairwise_reduce(std::int64_t begin, std::int64_t end, F&& f) {
  const std::int64_t len = end - begin;
  if (len <= 0) return T{};
  if (len <= 8) {
    T acc = f(begin);
    for (std::int64_t i = begin + 1; i < end; ++i) acc += f(i);
    return acc;
  }
  const std::int64_t mid = begin + len / 2;
  return pairwise_reduce<T>(begin, mid, f) + pairwise_reduce<T>(mid, end, f);
}

/// (sum_i |c_i|^t)^(1/t); the t-subadditive aggregate used by the
/// coefficient-side estimates. t = 0 is rejected.
double lp_quasi_norm(std::span<const std::complex<double>> coeffs, double t);

/// Least-squares slope of y against x (both already in whatever scale the
/// caller wants, typically log-log). Requires >= 2 points.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace aniso
