#include "aniso/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "aniso/errors.hpp"

namespace aniso {

using nlohmann::json;

const std::vector<std::string>& canonical_checks() {
  static const std::vector<std::string> order = {
      "dilation",  "varexp",    "atoms",            "lemma31", "lemma32",
      "theorem31", "theorem41", "hardy-littlewood", "maximal"};
  return order;
}

int RunConfig::effective_resolution() const {
  if (grid.resolution > 0) return grid.resolution;
  switch (dimension) {
    case 1: return 512;
    case 2: return 192;
    default: return 48;
  }
}

Matrix RunConfig::matrix_eigen() const {
  Matrix a(dimension, dimension);
  for (int i = 0; i < dimension; ++i) {
    for (int j = 0; j < dimension; ++j) {
      a(i, j) = matrix[static_cast<size_t>(i * dimension + j)];
    }
  }
  return a;
}

RunConfig RunConfig::defaults() {
  RunConfig cfg;
  cfg.matrix = {0.0, -2.0, 1.0, 0.0};
  cfg.atom.x0 = {0.25, -0.125};
  return cfg;
}

namespace {

double parse_r(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::kConfigError, "atom.r must be a number or \"inf\"");
  }
  return j.get<double>();
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig cfg = defaults();
  bool x0_given = false;
  try {
    if (j.contains("dimension")) cfg.dimension = j["dimension"].get<int>();
    if (j.contains("matrix")) cfg.matrix = j["matrix"].get<std::vector<double>>();
    if (j.contains("lambda_minus") && !j["lambda_minus"].is_null()) {
      cfg.lambda_minus = j["lambda_minus"].get<double>();
    }
    if (j.contains("lambda_plus") && !j["lambda_plus"].is_null()) {
      cfg.lambda_plus = j["lambda_plus"].get<double>();
    }
    if (j.contains("exponent")) {
      const json& e = j["exponent"];
      if (e.contains("family")) cfg.exponent.family = e["family"].get<std::string>();
      if (e.contains("p0")) cfg.exponent.p0 = e["p0"].get<double>();
      if (e.contains("p_inf")) cfg.exponent.p_inf = e["p_inf"].get<double>();
      if (e.contains("amplitude")) cfg.exponent.amplitude = e["amplitude"].get<double>();
      if (e.contains("background")) cfg.exponent.background = e["background"].get<double>();
      if (e.contains("pieces")) {
        cfg.exponent.pieces.clear();
        for (const json& piece : e["pieces"]) {
          RunConfig::Exponent::Piece pp;
          pp.lo = piece.at("lo").get<std::vector<double>>();
          pp.hi = piece.at("hi").get<std::vector<double>>();
          pp.value = piece.at("value").get<double>();
          cfg.exponent.pieces.push_back(std::move(pp));
        }
      }
    }
    if (j.contains("atom")) {
      const json& a = j["atom"];
      if (a.contains("x0")) {
        cfg.atom.x0 = a["x0"].get<std::vector<double>>();
        x0_given = true;
      }
      if (a.contains("k0")) cfg.atom.k0 = a["k0"].get<int>();
      if (a.contains("r")) cfg.atom.r = parse_r(a["r"]);
      if (a.contains("s") && !a["s"].is_null()) cfg.atom.s = a["s"].get<int>();
      if (a.contains("seed")) cfg.atom.seed = a["seed"].get<std::uint64_t>();
    }
    if (j.contains("decomposition")) {
      const json& dd = j["decomposition"];
      if (dd.contains("count")) cfg.decomposition.count = dd["count"].get<int>();
      if (dd.contains("coefficient_law")) {
        cfg.decomposition.coefficient_law = dd["coefficient_law"].get<std::string>();
      }
      if (dd.contains("coeff_lo")) cfg.decomposition.coeff_lo = dd["coeff_lo"].get<double>();
      if (dd.contains("coeff_hi")) cfg.decomposition.coeff_hi = dd["coeff_hi"].get<double>();
      if (dd.contains("ball_k_min")) cfg.decomposition.ball_k_min = dd["ball_k_min"].get<int>();
      if (dd.contains("ball_k_max")) cfg.decomposition.ball_k_max = dd["ball_k_max"].get<int>();
      if (dd.contains("center_spread")) {
        cfg.decomposition.center_spread = dd["center_spread"].get<double>();
      }
      if (dd.contains("seed")) cfg.decomposition.seed = dd["seed"].get<std::uint64_t>();
    }
    if (j.contains("grid")) {
      const json& g = j["grid"];
      if (g.contains("resolution")) cfg.grid.resolution = g["resolution"].get<int>();
      if (g.contains("box_padding")) cfg.grid.box_padding = g["box_padding"].get<double>();
    }
    if (j.contains("scan")) {
      const json& s = j["scan"];
      if (s.contains("k_min")) cfg.scan.k_min = s["k_min"].get<int>();
      if (s.contains("k_max")) cfg.scan.k_max = s["k_max"].get<int>();
      if (s.contains("directions")) cfg.scan.directions = s["directions"].get<int>();
      if (s.contains("delta_count")) cfg.scan.delta_count = s["delta_count"].get<int>();
    }
    if (j.contains("maximal")) {
      const json& mm = j["maximal"];
      if (mm.contains("i_min")) cfg.maximal.i_min = mm["i_min"].get<int>();
      if (mm.contains("i_max")) cfg.maximal.i_max = mm["i_max"].get<int>();
    }
    if (j.contains("checks")) cfg.checks = j["checks"].get<std::vector<std::string>>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("dump_atoms")) cfg.dump_atoms = j["dump_atoms"].get<bool>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("config field error: ") + e.what());
  }

  if (cfg.dimension < 1 || cfg.dimension > 3) {
    throw Error(ErrorCode::kConfigError, "dimension must be 1, 2 or 3");
  }
  if (static_cast<int>(cfg.matrix.size()) != cfg.dimension * cfg.dimension) {
    throw Error(ErrorCode::kConfigError, "matrix size does not match dimension");
  }
  if (!x0_given && static_cast<int>(cfg.atom.x0.size()) != cfg.dimension) {
    cfg.atom.x0.assign(static_cast<size_t>(cfg.dimension), 0.0);
  }
  if (static_cast<int>(cfg.atom.x0.size()) != cfg.dimension) {
    throw Error(ErrorCode::kConfigError, "atom.x0 size does not match dimension");
  }
  if (cfg.grid.resolution > 0) {
    const int res = cfg.grid.resolution;
    if (res < 2 || (res & (res - 1)) != 0) {
      throw Error(ErrorCode::kConfigError, "grid resolution must be a power of two");
    }
  }
  if (cfg.checks.empty()) {
    throw Error(ErrorCode::kConfigError, "checks must be nonempty");
  }
  const auto& order = canonical_checks();
  for (const std::string& c : cfg.checks) {
    if (std::find(order.begin(), order.end(), c) == order.end()) {
      throw Error(ErrorCode::kConfigError, "unknown check: " + c);
    }
  }
  if (cfg.decomposition.count < 1 || cfg.decomposition.count > 64) {
    throw Error(ErrorCode::kConfigError, "decomposition count must lie in [1, 64]");
  }
  if (cfg.scan.delta_count < 3 || cfg.scan.delta_count > 40) {
    throw Error(ErrorCode::kConfigError, "scan.delta_count must lie in [3, 40]");
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read config file " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_text(text);
}

}  // namespace aniso
