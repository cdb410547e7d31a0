#pragma once

#include <iosfwd>
#include <string>

#include "aniso/config.hpp"

namespace aniso {

/// Executes the requested checks in canonical order and writes report.csv,
/// summary.json and (on first run) pins.json under cfg.output_dir.
/// Returns 0 when every verdict passes, 1 when at least one fails (the
/// failures are listed on err), 2 on configuration or IO errors.
int run_verification(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_verification_file(const std::string& config_path, std::ostream& out, std::ostream& err);

/// Prints the summary table for a finished run. Returns 0, or 2 when the
/// directory has no summary.json.
int report_directory(const std::string& dir, std::ostream& out, std::ostream& err);

}  // namespace aniso
