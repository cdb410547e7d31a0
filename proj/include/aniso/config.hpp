#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aniso/linalg.hpp"

namespace aniso {

/// Parsed CLI configuration. Field names follow the JSON schema accepted by
/// `aniso verify --config`.
struct RunConfig {
  int dimension = 2;
  std::vector<double> matrix;  // row-major, dimension^2 entries
  std::optional<double> lambda_minus, lambda_plus;

  struct Exponent {
    std::string family = "log_perturbed";  // constant | log_perturbed | piecewise_test
    double p0 = 1.0;
    double p_inf = 0.65;
    double amplitude = 0.1;
    struct Piece {
      std::vector<double> lo, hi;
      double value = 1.0;
    };
    std::vector<Piece> pieces;
    double background = 1.0;
  } exponent;

  struct AtomSpec {
    std::vector<double> x0;
    int k0 = 0;
    double r = 2.0;          // may be infinity ("inf" in JSON)
    std::optional<int> s;    // absent = admissible minimum
    std::uint64_t seed = 20210;
  } atom;

  struct DecompositionSpec {
    int count = 5;
    std::string coefficient_law = "log_uniform";
    double coeff_lo = 1e-3, coeff_hi = 1e3;
    // transforms of a ball-k0 atom peak near shell -k0+2, so scales below 1
    // would push the spectral peak into the scan's outer third
    int ball_k_min = 1, ball_k_max = 3;
    double center_spread = 1.0;
    std::uint64_t seed = 77;
  } decomposition;

  struct GridSettings {
    int resolution = 0;  // 0 = dimension default (512 / 192 / 48)
    double box_padding = 1.25;
  } grid;

  struct ScanSettings {
    int k_min = -6, k_max = 6;
    int directions = 16;
    int delta_count = 12;
  } scan;

  struct MaximalSettings {
    int i_min = -6, i_max = 6;
  } maximal;

  std::vector<std::string> checks = {"dilation",  "varexp",    "atoms",
                                     "lemma31",   "lemma32",   "theorem31",
                                     "theorem41", "hardy-littlewood", "maximal"};
  std::string output_dir = "out";
  bool dump_atoms = false;

  int effective_resolution() const;
  Matrix matrix_eigen() const;

  static RunConfig defaults();
  /// Throws Error(kConfigError) on malformed input or violated invariants
  /// (dimension/matrix mismatch, non power-of-two resolution, empty checks,
  /// unknown check names).
  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
};

/// Canonical execution order; requested checks run in this order.
const std::vector<std::string>& canonical_checks();

}  // namespace aniso
