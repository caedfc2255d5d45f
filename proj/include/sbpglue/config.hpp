#pragma once

#include <string>

#include "sbpglue/system.hpp"

namespace sbpglue {

/// Everything a CLI subcommand needs to set up and run one case.
struct RunConfig {
  Scenario scenario = Scenario::TwoBlockConforming;
  int q = 2;
  int n = 64;
  double alpha = 1.0;
  double t_final = 1.0;
  double dt = 0.0;  // <= 0 selects the stable default
  std::string output_dir = ".";
  bool refine = true;
  int levels = 3;           // converge: N, 2N, 4N, ...
  double interval = 0.05;   // energy: sampling interval
};

/// Environment variable that overrides output_dir.
constexpr const char* kOutputDirEnv = "SBPGLUE_OUTPUT_DIR";

/// Key-value text with sections. Keys in [run] apply to every scenario; keys
/// in a section named after the selected scenario (e.g. [sbp-dg]) override
/// them. '#' and ';' start comments. Unknown keys or bad values throw
/// ConfigParse.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Sets one key (same names as the file) from its string form.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Checks ranges (q in 1..5, N even >= 2, alpha >= 0, t_final >= 0, ...).
void validate(const RunConfig& cfg);

/// Applies kOutputDirEnv if it is set and non-empty.
void apply_environment(RunConfig& cfg);

SystemConfig to_system_config(const RunConfig& cfg);

}  // namespace sbpglue
