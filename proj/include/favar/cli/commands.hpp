#pragma once

#include <string>
#include <vector>

#include "favar/cli/config.hpp"

namespace favar::cli {

// Command-line values layered on top of the config file.
struct CliOverrides {
  std::string out;
  long long seed = -1;
  std::string method;
  std::string var_spec;
  std::string benchmark;  // forecast: artifact dir of the comparison run
};

// Applies overrides and validates every enum-like field up front, so a bad
// --method fails before any data is touched.
RunConfig effective_config(RunConfig cfg, const CliOverrides& o);

// Artifact directory resolution: --out flag, then config out_dir (relative
// paths land under $FAVAR_ARTIFACTS when set), then $FAVAR_ARTIFACTS alone.
std::string resolve_out_dir(const RunConfig& cfg, const CliOverrides& o);

void cmd_prepare(const RunConfig& cfg, const std::string& out);
void cmd_crossval(const RunConfig& cfg, const std::string& out);
void cmd_train(const RunConfig& cfg, const std::string& out);
void cmd_factors(const RunConfig& cfg, const std::string& out);
void cmd_estimate_var(const RunConfig& cfg, const std::string& out);
void cmd_forecast(const RunConfig& cfg, const std::string& out,
                  const std::string& benchmark_dir);
void cmd_irf(const RunConfig& cfg, const std::string& out);

// 2 for configuration problems, 3 for data and artifact problems, 4 for
// numerical failures (and anything unclassified).
int exit_code_for(const std::exception& e);

// argv entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args after argv[0]

}  // namespace favar::cli
