#include "aniso/report.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "aniso/errors.hpp"

namespace aniso {

namespace {

constexpr double kPinGrowthAllowance = 1.10;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

}  // namespace

void append_row(VerificationReport& rep, const std::string& params, const std::string& point,
                double measured, double bound, bool pass) {
  ReportRow row;
  row.check = rep.summary.check;
  row.params = params;
  row.point = point;
  row.measured = measured;
  row.bound = bound;
  row.ratio = bound != 0.0 ? measured / bound : 0.0;
  row.pass = pass;
  rep.rows.push_back(std::move(row));
  if (!pass) rep.summary.pass = false;
}

void write_report_csv(const std::string& path, std::span<const VerificationReport> reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot open " + path);
  out << "check,params,point,measured,bound,ratio,pass\n";
  for (const VerificationReport& rep : reports) {
    for (const ReportRow& row : rep.rows) {
      out << row.check << ',' << row.params << ',' << row.point << ',' << fmt(row.measured)
          << ',' << fmt(row.bound) << ',' << fmt(row.ratio) << ','
          << (row.pass ? "pass" : "fail") << '\n';
    }
  }
}

std::optional<PinStore> PinStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("pins.json unreadable: ") + e.what());
  }
  PinStore store;
  for (const auto& [check, metrics] : j.items()) {
    for (const auto& [name, value] : metrics.items()) {
      store.pins_[check][name] = value.get<double>();
    }
  }
  return store;
}

void PinStore::create(const std::string& path, std::span<const CheckSummary> summaries) {
  nlohmann::ordered_json j;
  for (const CheckSummary& s : summaries) {
    if (s.metrics.empty()) continue;
    nlohmann::ordered_json entry;
    for (const auto& [name, value] : s.metrics) entry[name] = value;
    j[s.check] = entry;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot open " + path);
  out << j.dump(2) << '\n';
}

std::vector<PinOutcome> PinStore::compare(const CheckSummary& summary) const {
  std::vector<PinOutcome> outcomes;
  const auto check_it = pins_.find(summary.check);
  for (const auto& [name, measured] : summary.metrics) {
    PinOutcome o;
    o.metric = name;
    o.measured = measured;
    if (check_it == pins_.end() || !check_it->second.count(name)) {
      o.status = PinStatus::kAbsent;
    } else {
      o.pinned = check_it->second.at(name);
      o.status = measured <= o.pinned * kPinGrowthAllowance ? PinStatus::kChecked
                                                            : PinStatus::kFailed;
    }
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

void write_summary_json(const std::string& path, std::span<const CheckSummary> summaries,
                        const std::map<std::string, std::vector<PinOutcome>>& pin_outcomes,
                        bool pins_created) {
  nlohmann::ordered_json j;
  j["pins_created"] = pins_created;
  bool all_pass = true;
  auto checks = nlohmann::ordered_json::array();
  for (const CheckSummary& s : summaries) {
    nlohmann::ordered_json entry;
    entry["check"] = s.check;
    entry["sup_ratio"] = s.sup_ratio;
    if (s.slope) {
      entry["slope"] = *s.slope;
    } else {
      entry["slope"] = nullptr;
    }
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    for (const auto& [name, value] : s.metrics) metrics[name] = value;
    entry["metrics"] = metrics;
    bool pin_fail = false;
    if (auto it = pin_outcomes.find(s.check); it != pin_outcomes.end()) {
      auto pins = nlohmann::ordered_json::array();
      for (const PinOutcome& o : it->second) {
        const char* status = o.status == PinStatus::kCreated   ? "created"
                             : o.status == PinStatus::kChecked ? "checked"
                             : o.status == PinStatus::kFailed  ? "failed"
                                                               : "absent";
        pins.push_back({{"metric", o.metric},
                        {"pinned", o.pinned},
                        {"measured", o.measured},
                        {"status", status}});
        if (o.status == PinStatus::kFailed) pin_fail = true;
      }
      entry["pins"] = pins;
    }
    const bool pass = s.pass && !pin_fail;
    entry["verdict"] = pass ? "pass" : "fail";
    entry["notes"] = s.notes;
    all_pass = all_pass && pass;
    checks.push_back(std::move(entry));
  }
  j["checks"] = checks;
  j["all_pass"] = all_pass;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kConfigError, "cannot open " + path);
  out << j.dump(2) << '\n';
}

}  // namespace aniso
