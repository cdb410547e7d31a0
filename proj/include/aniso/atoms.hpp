#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aniso/dilation.hpp"
#include "aniso/sampling.hpp"
#include "aniso/varexp.hpp"

namespace aniso {

using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& gamma);
std::vector<MultiIndex> multi_indices_up_to(int dimension, int max_degree);

/// Least admissible moment order for the pair (p, A):
/// max(0, floor((1/p_- - 1) ln b / ln lambda_-)).
int min_moment_order(const ExponentFunction& p, const DilationStructure& d);

struct MomentResidual {
  MultiIndex gamma;
  double value = 0.0;  // |integral of a(x) x^gamma|
};

/// A validated atom: supported in center + B_scale, L^r norm matching the
/// size bound with equality, moments up to s_order vanishing on the grid.
struct Atom {
  Ball ball;
  double r_exp = 2.0;  // integrability exponent, may be infinity
  int s_order = 0;
  SampledFunction samples;
  double lr_norm = 0.0;
  double l1_norm = 0.0;
  double indicator_variable_norm = 0.0;  // |1_B| in the variable norm, same grid
  std::vector<MomentResidual> moment_residuals;

  /// Closed form behind the samples (bump times corrected polynomial); lets
  /// the analysis resample exactly instead of interpolating. Self-contained,
  /// no reference back to the dilation.
  std::function<double(const Vector&)> closed_form;

  double max_moment_residual() const;
};

struct AtomRecipe {
  Ball ball;
  double r_exp = 2.0;
  int s_order = -1;  // -1 = use min_moment_order
  std::uint64_t seed = 1;
};

/// Builds an atom on the given grid: a seeded smooth bump times a seeded
/// polynomial of degree s+1, corrected inside the bump weight so that all
/// grid moments of degree <= s vanish, then rescaled so the size condition
/// holds with equality. Throws DegenerateSeed after repeated collapses and
/// GramIllConditioned when the moment system is numerically unusable.
Atom make_atom(const DilationStructure& d, const ExponentFunction& p, const AtomRecipe& recipe,
               const GridSpec& grid);

/// L^r norm over the grid (max norm when r is infinite).
double lr_norm_on_grid(const SampledFunction& f, double r_exp);

struct AtomValidation {
  bool support_ok = false;
  bool size_ok = false;
  bool moments_ok = false;
  double support_leak = 0.0;        // largest |value| outside the ball
  double size_ratio = 0.0;          // lr_norm / (|B|^(1/r) / |1_B|)
  double moment_residual_rel = 0.0; // max residual / l1
  bool all_ok() const { return support_ok && size_ok && moments_ok; }
};

/// Re-measures the three atom conditions from the samples, independently of
/// how the atom was built.
AtomValidation validate_atom(const DilationStructure& d, const ExponentFunction& p,
                             const Atom& atom);

struct AtomicDecomposition {
  std::vector<std::complex<double>> coefficients;
  std::vector<Atom> atoms;
};

constexpr int kMaxDecompositionSize = 64;

/// The aggregated coefficient/ball size
///   | { sum_i [ |c_i| 1_{B_i} / |1_{B_i}| ]^p_ul }^(1/p_ul) |_{L^p(.)}
/// evaluated for the given decomposition on the shared grid. An upper bound
/// for the infimum over all decompositions, which is out of scope here.
double atomic_norm_expression(const ExponentFunction& p, const DilationStructure& d,
                              const AtomicDecomposition& decomp, const GridSpec& grid);

struct CoefficientSumResult {
  double coefficient_sum = 0.0;
  double norm_expression = 0.0;
  bool holds = false;  // coefficient_sum <= norm_expression * (1 + 1e-4)
};

CoefficientSumResult coefficient_sum_check(const ExponentFunction& p, const DilationStructure& d,
                                           const AtomicDecomposition& decomp,
                                           const GridSpec& grid);

/// Pointwise finite sum of coefficient * atom on the common grid.
SampledFunction synthesize(const AtomicDecomposition& decomp);

/// CSV of the samples plus a JSON sidecar (ball, r, s, norms, residuals).
void dump_atom(const std::string& csv_path, const std::string& json_path, const Atom& atom);

}  // namespace aniso
