#include "aniso/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aniso/errors.hpp"

namespace aniso {

namespace {

// Real roots of t^3 + p t + q = 0 when the discriminant is nonnegative
// (three real roots, trigonometric form).
void depressed_cubic_real_roots(double p, double q, double roots[3]) {
  if (std::abs(p) < 1e-300) {
    const double r = std::cbrt(-q);
    roots[0] = roots[1] = roots[2] = r;
    return;
  }
  const double m = 2.0 * std::sqrt(-p / 3.0);
  double arg = 3.0 * q / (p * m);
  arg = std::clamp(arg, -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  for (int k = 0; k < 3; ++k) {
    roots[k] = m * std::cos(theta - 2.0 * M_PI * k / 3.0);
  }
}

}  // namespace

double det_small(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  switch (n) {
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default:
      throw Error(ErrorCode::kConfigError, "dimension must be 1, 2 or 3");
  }
}

Matrix inverse_small(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  const double det = det_small(a);
  if (std::abs(det) < 1e-300) {
    throw Error(ErrorCode::kSingularMatrix, "matrix not invertible");
  }
  Matrix inv(n, n);
  switch (n) {
    case 1:
      inv(0, 0) = 1.0 / det;
      break;
    case 2:
      inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
      inv /= det;
      break;
    case 3: {
      inv(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
      inv(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
      inv(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
      inv(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
      inv(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
      inv(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
      inv(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
      inv(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
      inv(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
      inv /= det;
      break;
    }
    default:
      throw Error(ErrorCode::kConfigError, "dimension must be 1, 2 or 3");
  }
  return inv;
}

std::vector<double> eigen_moduli(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw Error(ErrorCode::kConfigError, "matrix must be square");
  std::vector<double> moduli;
  switch (n) {
    case 1:
      moduli = {std::abs(a(0, 0))};
      break;
    case 2: {
      const double tr = a(0, 0) + a(1, 1);
      const double det = det_small(a);
      const double disc = tr * tr - 4.0 * det;
      if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        moduli = {std::abs((tr - s) / 2.0), std::abs((tr + s) / 2.0)};
      } else {
        // complex conjugate pair; |lambda|^2 = det
        const double m = std::sqrt(det);
        moduli = {m, m};
      }
      break;
    }
    case 3: {
      const double c2 = a.trace();
      const double c1 = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) +
                        (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) +
                        (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1));
      const double c0 = det_small(a);
      // lambda = t + c2/3 turns det(A - lambda I) = 0 into t^3 + p t + q = 0
      const double shift = c2 / 3.0;
      const double p = c1 - c2 * c2 / 3.0;
      const double q = -2.0 * c2 * c2 * c2 / 27.0 + c1 * c2 / 3.0 - c0;
      const double disc = -4.0 * p * p * p - 27.0 * q * q;
      if (disc >= -1e-12 * std::max(1.0, p * p * q * q)) {
        double t[3];
        depressed_cubic_real_roots(p, q, t);
        moduli = {std::abs(t[0] + shift), std::abs(t[1] + shift), std::abs(t[2] + shift)};
      } else {
        // one real root plus a conjugate pair
        const double s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        const double u = std::cbrt(-q / 2.0 + s);
        const double v = std::cbrt(-q / 2.0 - s);
        const double real_root = u + v + shift;
        const double pair_sq = std::abs(c0 / real_root);
        const double m = std::sqrt(pair_sq);
        moduli = {std::abs(real_root), m, m};
      }
      break;
    }
    default:
      throw Error(ErrorCode::kConfigError, "dimension must be 1, 2 or 3");
  }
  std::sort(moduli.begin(), moduli.end());
  return moduli;
}

double power_int(double base, int exponent) {
  if (exponent == 0) return 1.0;
  if (exponent < 0) return 1.0 / power_int(base, -exponent);
  double acc = 1.0;
  double sq = base;
  int e = exponent;
  while (e > 0) {
    if (e & 1) acc *= sq;
    sq *= sq;
    e >>= 1;
  }
  return acc;
}

double lp_quasi_norm(std::span<const std::complex<double>> coeffs, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::kConfigError, "exponent t must be positive");
  const double total = pairwise_reduce<double>(
      0, static_cast<std::int64_t>(coeffs.size()),
      [&](std::int64_t i) { return std::pow(std::abs(coeffs[static_cast<size_t>(i)]), t); });
  return std::pow(total, 1.0 / t);
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) {
    throw Error(ErrorCode::kConfigError, "slope fit needs >= 2 matched points");
  }
  double sx = 0.0, sy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx < 1e-30) throw Error(ErrorCode::kConfigError, "slope fit: degenerate abscissae");
  return sxy / sxx;
}

}  // namespace aniso
