#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aniso {

/// One measured point of a verification scan.
struct ReportRow {
  std::string check;
  std::string params;
  std::string point;
  double measured = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool pass = true;
};

/// Per-check outcome. `metrics` holds the regression-pinnable scalars
/// (sup ratios and similar existential constants).
struct CheckSummary {
  std::string check;
  double sup_ratio = 0.0;
  std::optional<double> slope;
  bool pass = true;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;
};

struct VerificationReport {
  std::vector<ReportRow> rows;
  CheckSummary summary;
};

void append_row(VerificationReport& rep, const std::string& params, const std::string& point,
                double measured, double bound, bool pass);

/// report.csv: header then one line per row, %.12e numbers, stable order.
void write_report_csv(const std::string& path, std::span<const VerificationReport> reports);

enum class PinStatus { kCreated, kChecked, kFailed, kAbsent };

struct PinOutcome {
  std::string metric;
  double pinned = 0.0;
  double measured = 0.0;
  PinStatus status = PinStatus::kAbsent;
};

/// pins.json lifecycle: written once when absent, never rewritten; later runs
/// compare each metric against pinned * (1 + 10%).
class PinStore {
 public:
  static std::optional<PinStore> load(const std::string& path);
  static void create(const std::string& path, std::span<const CheckSummary> summaries);

  /// Growth check for one summary; failures flip summary.pass downstream.
  std::vector<PinOutcome> compare(const CheckSummary& summary) const;

 private:
  std::map<std::string, std::map<std::string, double>> pins_;
};

void write_summary_json(const std::string& path, std::span<const CheckSummary> summaries,
                        const std::map<std::string, std::vector<PinOutcome>>& pin_outcomes,
                        bool pins_created);

}  // namespace aniso
