#pragma once

#include <memory>
#include <span>
#include <vector>

#include "aniso/dilation.hpp"
#include "aniso/sampling.hpp"

namespace aniso {

/// Variable exponent p(.) from a parametric family, so the extremes p_-, p_+
/// are exact numbers rather than estimates.
///
///   constant       p(x) = p0
///   log_perturbed  p(x) = p_inf + amplitude / ln(e + rho(x)), clamped to <= 1
///   piecewise_test p(x) from axis-aligned boxes with a background value;
///                  test-only, deliberately not log-Holder continuous
class ExponentFunction {
 public:
  enum class Family { kConstant, kLogPerturbed, kPiecewiseTest };

  struct Piece {
    Vector lo, hi;  // half-open box [lo, hi)
    double value = 1.0;
  };

  static ExponentFunction constant(double p0);
  static ExponentFunction log_perturbed(double p_inf, double amplitude, DilationPtr geometry);
  static ExponentFunction piecewise_test(std::vector<Piece> pieces, double background);

  Family family() const { return family_; }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  double p_underline() const { return std::min(p_minus_, 1.0); }
  /// Value at infinity in the decay condition sense (p0 for constant,
  /// background for piecewise_test).
  double p_infinity() const { return p_inf_; }
  double amplitude() const { return amplitude_; }
  bool log_holder_conforming() const { return family_ != Family::kPiecewiseTest; }

  double operator()(const Vector& x) const;

 private:
  ExponentFunction() = default;
  Family family_ = Family::kConstant;
  double p_minus_ = 1.0, p_plus_ = 1.0;
  double p_inf_ = 1.0, amplitude_ = 0.0;
  double background_ = 1.0;
  std::vector<Piece> pieces_;
  DilationPtr geometry_;
};

/// Quadrature approximation of the modular integral |f(x)|^p(x) dx.
double modular(const ExponentFunction& p, const SampledFunction& f);

/// Luxemburg-Nakano quasi-norm: inf { lam > 0 : modular(f/lam) <= 1 } by
/// bracketed bisection (relative 1e-8, <= 80 iterations). Returns 0 iff f is
/// zero on the grid; throws BracketFailure when no bracket exists within
/// 2^(+-120) scaling.
double luxemburg_norm(const ExponentFunction& p, const SampledFunction& f);

/// Norm of the rasterized indicator of x0 + B_k on the given grid.
double indicator_norm(const ExponentFunction& p, const DilationStructure& d, const Ball& ball,
                      const GridSpec& grid);

struct LogHolderDiagnostics {
  double c_log_empirical = 0.0;  // smallest constant for the local condition
  double c_inf_empirical = 0.0;  // smallest constant for the decay condition
  double p_inf = 0.0;
  bool conforming = true;
  long pair_count = 0;
};

/// Empirical smallest constants over the sample: consecutive points are
/// paired for the local modulus, every point feeds the decay condition.
LogHolderDiagnostics log_holder_check(const ExponentFunction& p, const DilationStructure& d,
                                      std::span<const Vector> samples);

/// Internal reuse: p evaluated once per node, then many modular evaluations
/// at different scalings of the same samples.
std::vector<double> exponent_table(const ExponentFunction& p, const GridSpec& grid);
double modular_scaled(const SampledFunction& f, std::span<const double> p_table, double lam);
double luxemburg_norm_with_table(const SampledFunction& f, std::span<const double> p_table);

}  // namespace aniso
