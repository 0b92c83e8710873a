#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "semlab/controls.hpp"
#include "semlab/format.hpp"
#include "semlab/generate.hpp"
#include "semlab/heat.hpp"
#include "semlab/inequalities.hpp"
#include "semlab/scenario.hpp"

namespace {

int run_verify(const semlab::ScenarioConfig& config) {
  const auto outcome = semlab::run_scenario(config);
  int failed = 0;
  for (const auto& r : outcome.result.reports)
    if (r.status == semlab::ReportStatus::Failed) {
      ++failed;
      std::cerr << "FAILED " << r.name << " slack " << semlab::fmt17(r.slack);
      if (auto it = r.notes.find("repro"); it != r.notes.end()) std::cerr << " [" << it->second << "]";
      std::cerr << "\n";
    }
  std::cout << outcome.result.reports.size() << " checks, " << failed << " failed; artifacts in " << config.out
            << "\n";
  return outcome.exit_code;
}

int run_report(const std::string& path, const std::string& format) {
  const auto reports = nlohmann::json::parse(semlab::read_text_file(path));
  if (!reports.is_array()) throw semlab::Error(path + ": expected a report array");
  int failed = 0;
  if (format == "csv") std::cout << "name,status,slack\n";
  for (const auto& r : reports) {
    const std::string status = r.at("status").get<std::string>();
    if (status == "failed") ++failed;
    const std::string slack = r.at("slack").is_number() ? semlab::fmt17(r.at("slack").get<double>()) : "nan";
    if (format == "csv")
      std::cout << r.at("name").get<std::string>() << "," << status << "," << slack << "\n";
    else
      std::cout << r.at("name").get<std::string>() << "  " << status << "  slack " << slack << "\n";
  }
  if (format != "csv") std::cout << reports.size() << " checks, " << failed << " failed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semlab: heat-smoothing inequalities on finite metric measure spaces"};
  app.require_subcommand(1);

  semlab::ScenarioConfig config;
  std::string config_file;
  double fit_b = 0.0;
  auto* verify = app.add_subcommand("verify", "run the verification suite and write report artifacts");
  verify->add_option("--config", config_file, "scenario file of key=value tokens; flags override it");
  verify->add_option("--space", config.space, "family spec (e.g. cycle:n=12) or space file");
  verify->add_option("--seed", config.seed, "random seed");
  verify->add_option("--t-grid", config.t_grid, "log:<min>,<max>,<count>");
  verify->add_option("--suite", config.suite, "all or comma-separated groups");
  verify->add_option("--samples", config.samples, "random instances per check");
  verify->add_option("--control", config.control, "fit | power:M=..,b=.. | reference:K=.. | file:<path>");
  verify->add_option("--fit-b", fit_b, "fixed exponent for the fitted control");
  verify->add_option("--out", config.out, "output directory");

  std::string sweep_space, sweep_out, sweep_grid = "log:0.001,1,40";
  auto* sweep = app.add_subcommand("sweep", "tabulate t, c_star, C_star, theta");
  sweep->add_option("--space", sweep_space, "family spec or space file")->required();
  sweep->add_option("--t-grid", sweep_grid, "log:<min>,<max>,<count>");
  sweep->add_option("--out", sweep_out, "CSV path (stdout when omitted)");

  std::string samples_path, fit_out;
  std::optional<double> fixed_b;
  auto* fit = app.add_subcommand("fit", "fit a power control to (t, c) samples");
  fit->add_option("--samples", samples_path, "CSV of t,c pairs")->required();
  fit->add_option("--b", fixed_b, "fixed exponent");
  fit->add_option("--out", fit_out, "control JSON path (stdout when omitted)");

  std::string report_path, report_format = "text";
  auto* report = app.add_subcommand("report", "summarize a report file");
  report->add_option("report", report_path, "report.json")->required();
  report->add_option("--format", report_format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      semlab::ScenarioConfig merged = config_file.empty() ? semlab::ScenarioConfig{} : semlab::load_config_file(config_file);
      if (!config_file.empty()) {
        if (verify->count("--space")) merged.space = config.space;
        if (verify->count("--seed")) merged.seed = config.seed;
        if (verify->count("--t-grid")) merged.t_grid = config.t_grid;
        if (verify->count("--suite")) merged.suite = config.suite;
        if (verify->count("--samples")) merged.samples = config.samples;
        if (verify->count("--control")) merged.control = config.control;
        if (verify->count("--out")) merged.out = config.out;
      } else {
        merged = config;
      }
      if (verify->count("--fit-b")) merged.fit_b = fit_b;
      if (merged.space.empty()) throw semlab::Error("verify needs --space or a config with space=");
      return run_verify(semlab::parse_config(semlab::serialize_config(merged)));
    }
    if (*sweep) {
      const auto generated = semlab::resolve_space(sweep_space);
      const semlab::HeatOperator heat(generated.space, generated.dirichlet);
      const semlab::SmoothingProfile profile(heat, semlab::parse_t_grid(sweep_grid));
      const std::string table = semlab::sweep_table(profile);
      if (sweep_out.empty()) std::cout << table;
      else semlab::write_text_file(sweep_out, table);
      return 0;
    }
    if (*fit) {
      const auto samples = semlab::read_samples(samples_path);
      const auto control = semlab::fit_power_control(samples, fixed_b);
      if (fit_out.empty()) std::cout << control.to_json().dump(1) << "\n";
      else semlab::save_control_file(fit_out, control);
      return 0;
    }
    if (*report) return run_report(report_path, report_format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
