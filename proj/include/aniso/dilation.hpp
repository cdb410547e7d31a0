#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "aniso/linalg.hpp"

namespace aniso {

/// Open ellipsoid {x : x^T form x < level} with det(form) = 1, so the level
/// alone fixes the volume.
struct Ellipsoid {
  Matrix form;
  double level = 0.0;
};

/// Dilated ball x0 + B_k (B_k = A^k * Delta).
struct Ball {
  Vector center;
  int scale = 0;
};

struct SpectrumInfo {
  std::vector<double> moduli;  // ascending
  double abs_det = 0.0;        // b
};

/// Eigenvalue moduli and b = |det A|. Throws SingularMatrix when
/// |det A| < 1e-12 and NotExpansive when the smallest modulus is <= 1 + 1e-12.
SpectrumInfo spectrum(const Matrix& a);

struct DilationOptions {
  std::optional<double> lambda_minus;  // default (1 - 1e-3) * min |sigma(A)|
  std::optional<double> lambda_plus;   // default (1 + 1e-3) * max |sigma(A)|
  int series_depth = 60;
};

/// Expansive matrix together with its derived geometry: spectrum bounds, the
/// unit-volume ellipsoid Delta with Delta ⊂ r·Delta ⊂ A·Delta, the step
/// quasi-norm rho, and (lazily) the same structure for the adjoint matrix.
/// Immutable after construction; all queries are const and thread-safe.
class DilationStructure {
 public:
  static std::shared_ptr<const DilationStructure> make(const Matrix& a,
                                                       const DilationOptions& opts = {});

  int dimension() const { return n_; }
  const Matrix& matrix() const { return a_; }
  const Matrix& matrix_inverse() const { return a_inv_; }
  double det_factor() const { return b_; }  // b = |det A|
  double eig_min() const { return eig_min_; }
  double eig_max() const { return eig_max_; }
  double lambda_minus() const { return lambda_minus_; }
  double lambda_plus() const { return lambda_plus_; }
  const Ellipsoid& unit_ellipsoid() const { return shape_; }
  double expansion_factor() const { return r_; }
  int tau() const { return tau_; }

  /// Structure for A^T (houses rho_*). Built on first use, memoized.
  std::shared_ptr<const DilationStructure> adjoint() const;

  /// A^k x (k of either sign).
  Vector apply_power(const Vector& x, int k) const;

  /// x^T P x / c; < 1 iff x lies in Delta.
  double ellipsoid_quadratic(const Vector& x) const;

  /// x in B_i = A^i Delta (open; boundary belongs to the next shell out).
  bool in_ball(const Vector& x, int i) const;

  /// The i with x in B_{i+1} \ B_i. Precondition: x != 0.
  int shell_index(const Vector& x) const;

  /// Step homogeneous quasi-norm: 0 at the origin, else b^shell_index(x)
  /// computed through power_int so equal indices give bit-equal values.
  double quasi_norm(const Vector& x) const;

  double ball_volume(int i) const { return power_int(b_, i); }

  /// max |x| over the closure of B_i.
  double ball_bounding_radius(int i) const;

  /// Axis-aligned half-widths of the bounding box of B_i.
  Vector ball_bounding_box(int i) const;

  /// The positive t with t*direction on the boundary of B_i.
  double boundary_radius(const Vector& direction, int i) const;

 private:
  DilationStructure() = default;

  int n_ = 0;
  Matrix a_, a_inv_;
  double b_ = 0.0;
  double eig_min_ = 0.0, eig_max_ = 0.0;
  double lambda_minus_ = 0.0, lambda_plus_ = 0.0;
  Ellipsoid shape_;
  double r_ = 0.0;
  int tau_ = 0;
  double seed_scale_ = 1.0;  // typical Delta radius, seeds the index search
  DilationOptions opts_;

  std::vector<Matrix> pow_pos_, pow_neg_;  // A^j and A^-j, j = 0..kPowCache

  mutable std::once_flag adjoint_once_;
  mutable std::shared_ptr<const DilationStructure> adjoint_cache_;
};

using DilationPtr = std::shared_ptr<const DilationStructure>;

/// Empirical Lemma-style comparability constants between |x| and powers of
/// rho(x), split by regime. In the large regime (rho > 1) the lower exponent
/// is ln(lambda_-)/ln b and the upper ln(lambda_+)/ln b; in the small regime
/// (rho <= 1) they swap.
struct RegimeBand {
  double c_low = 0.0;   // min over samples of |x| / rho^(lower exponent)
  double c_high = 0.0;  // max over samples of |x| / rho^(upper exponent)
  long count = 0;
};

struct ComparabilityBand {
  double exp_minus = 0.0;  // ln(lambda_-)/ln b
  double exp_plus = 0.0;   // ln(lambda_+)/ln b
  RegimeBand small_rho;    // rho(x) <= 1
  RegimeBand large_rho;    // rho(x) > 1
};

/// Scans the samples (origin excluded by precondition) and reports the band
/// extremes. Throws EmptyRegime when either regime has no samples.
ComparabilityBand comparability_band(const DilationStructure& d,
                                     std::span<const Vector> samples);

}  // namespace aniso
