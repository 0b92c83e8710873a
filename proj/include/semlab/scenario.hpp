#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semlab/controls.hpp"
#include "semlab/heat.hpp"
#include "semlab/suite.hpp"

namespace semlab {

// Whitespace-separated key=value tokens; '#' starts a comment.
//   space    family spec or space file (required)
//   t_grid   log:<min>,<max>,<count>
//   seed     unsigned 64-bit
//   suite    all or comma-separated groups
//   samples  random instances per check
//   control  fit | power:M=<M>,b=<b> | power_log:M=..,a=..,b=.. | reference:K=<K>[,M=<M>] | file:<path>
//   fit_b    fixed exponent for the fit (optional)
//   out      output directory
struct ScenarioConfig {
  std::string space;
  std::string t_grid = "log:0.001,1,40";
  std::uint64_t seed = 0;
  std::string suite = "all";
  int samples = 100;
  std::string control = "fit";
  std::optional<double> fit_b;
  std::string out = "semlab-out";
};

ScenarioConfig parse_config(const std::string& text);
// Canonical form: every key in fixed order, defaults written out.
std::string serialize_config(const ScenarioConfig& config);
ScenarioConfig load_config_file(const std::string& path);

std::vector<double> parse_t_grid(const std::string& spec);
// nullopt for "fit".
std::optional<ControlModel> parse_control_spec(const std::string& spec);

// Columns t,c_star,C_star,theta at 17 significant digits.
std::string sweep_table(const SmoothingProfile& profile);
std::string summary_text(const ScenarioConfig& config, const HeatOperator& heat, const SuiteResult& result);

struct ScenarioOutcome {
  int exit_code = 0;  // 0 iff no report failed
  SuiteResult result;
  std::vector<std::string> files;
};

// Runs the suite and writes config.txt, report.json, report.csv, sweep.csv,
// control.json and summary.txt into config.out. All files are written after
// the computation finishes.
ScenarioOutcome run_scenario(const ScenarioConfig& config);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace semlab
