#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aniso/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"anisotropic variable-exponent Hardy space verification harness"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* verify = app.add_subcommand("verify", "run the checks from a JSON config");
  verify->add_option("--config", config_path, "path to the JSON config")->required();

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "print the summary table for a finished run");
  report->add_option("--dir", report_dir, "output directory of a previous run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  if (verify->parsed()) {
    return aniso::run_verification_file(config_path, std::cout, std::cerr);
  }
  return aniso::report_directory(report_dir, std::cout, std::cerr);
}
