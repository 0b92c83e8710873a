#include "semlab/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "semlab/format.hpp"
#include "semlab/generate.hpp"

namespace semlab {

namespace {

const std::vector<std::string> kKeys{"space", "t_grid", "seed", "suite", "samples", "control", "fit_b", "out"};

template <class T>
bool parse_number(const std::string& text, T& value) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : fmt17(v);
}

struct Token {
  std::string text;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  int line = 1, column = 1;
  bool comment = false;
  Token current;
  auto flush = [&] {
    if (!current.text.empty()) tokens.push_back(current);
    current = Token{};
  };
  for (char ch : text) {
    if (ch == '\n') {
      flush();
      comment = false;
      ++line;
      column = 1;
      continue;
    }
    if (!comment) {
      if (ch == '#') {
        flush();
        comment = true;
      } else if (ch == ' ' || ch == '\t' || ch == '\r') {
        flush();
      } else {
        if (current.text.empty()) {
          current.line = line;
          current.column = column;
        }
        current.text += ch;
      }
    }
    ++column;
  }
  flush();
  return tokens;
}

std::string where(const Token& t) {
  return "line " + std::to_string(t.line) + ", column " + std::to_string(t.column);
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig config;
  std::map<std::string, Token> seen;
  for (const Token& token : tokenize(text)) {
    const auto eq = token.text.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error("config " + where(token) + ": expected key=value, got '" + token.text + "'");
    const std::string key = token.text.substr(0, eq);
    const std::string value = token.text.substr(eq + 1);
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw Error("config " + where(token) + ": unknown key '" + key + "'");
    if (seen.count(key)) throw Error("config " + where(token) + ": duplicate key '" + key + "'");
    if (value.empty()) throw Error("config " + where(token) + ": empty value for '" + key + "'");
    seen[key] = token;
    auto bad = [&](const std::string& what) {
      return Error("config " + where(token) + ": " + key + " must be " + what + ", got '" + value + "'");
    };
    if (key == "space") {
      config.space = value;
    } else if (key == "t_grid") {
      try {
        parse_t_grid(value);
      } catch (const Error& e) {
        throw Error("config " + where(token) + ": t_grid: " + e.what());
      }
      config.t_grid = value;
    } else if (key == "seed") {
      if (!parse_number(value, config.seed)) throw bad("an unsigned integer");
    } else if (key == "suite") {
      try {
        parse_groups(value);
      } catch (const Error& e) {
        throw Error("config " + where(token) + ": suite: " + e.what());
      }
      config.suite = value;
    } else if (key == "samples") {
      if (!parse_number(value, config.samples) || config.samples < 0) throw bad("a nonnegative integer");
    } else if (key == "control") {
      if (value.rfind("file:", 0) != 0 && !std::filesystem::exists(value)) {
        try {
          parse_control_spec(value);
        } catch (const Error& e) {
          throw Error("config " + where(token) + ": control: " + e.what());
        }
      }
      config.control = value;
    } else if (key == "fit_b") {
      double b = 0.0;
      if (!parse_number(value, b) || !(b > 0.0 && b < 1.0)) throw bad("a number in (0, 1)");
      config.fit_b = b;
    } else if (key == "out") {
      config.out = value;
    }
  }
  if (config.space.empty()) throw Error("config: missing required key 'space'");
  return config;
}

std::string serialize_config(const ScenarioConfig& config) {
  const std::vector<double> grid = parse_t_grid(config.t_grid);
  std::ostringstream out;
  out << "space=" << config.space << "\n";
  out << "t_grid=log:" << shortest(grid.front()) << "," << shortest(grid.back()) << "," << grid.size() << "\n";
  out << "seed=" << config.seed << "\n";
  std::string suite;
  for (const auto& g : parse_groups(config.suite)) suite += (suite.empty() ? "" : ",") + g;
  out << "suite=" << (parse_groups(config.suite) == suite_groups() ? "all" : suite) << "\n";
  out << "samples=" << config.samples << "\n";
  out << "control=" << config.control << "\n";
  if (config.fit_b) out << "fit_b=" << shortest(*config.fit_b) << "\n";
  out << "out=" << config.out << "\n";
  return out.str();
}

ScenarioConfig load_config_file(const std::string& path) {
  try {
    return parse_config(read_text_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::vector<double> parse_t_grid(const std::string& spec) {
  const std::string prefix = "log:";
  if (spec.rfind(prefix, 0) != 0) throw Error("t-grid must look like log:<min>,<max>,<count>, got '" + spec + "'");
  std::stringstream ss(spec.substr(prefix.size()));
  std::vector<std::string> parts;
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  double lo = 0.0, hi = 0.0;
  int count = 0;
  if (parts.size() != 3 || !parse_number(parts[0], lo) || !parse_number(parts[1], hi) ||
      !parse_number(parts[2], count))
    throw Error("t-grid must look like log:<min>,<max>,<count>, got '" + spec + "'");
  if (!(lo > 0.0) || !(hi >= lo) || count < 1 || (count == 1 && hi != lo) || (count > 1 && !(hi > lo)))
    throw Error("t-grid needs 0 < min < max and count >= 2 (or min = max, count = 1), got '" + spec + "'");
  if (count == 1) return {lo};
  return log_grid(lo, hi, count);
}

std::optional<ControlModel> parse_control_spec(const std::string& spec) {
  if (spec == "fit") return std::nullopt;
  if (spec.rfind("file:", 0) == 0) return load_control_file(spec.substr(5));
  if (std::filesystem::exists(spec)) return load_control_file(spec);
  const FamilySpec parsed = FamilySpec::parse(spec);
  auto require = [&](const std::string& key) {
    if (!parsed.params.count(key)) throw Error("control '" + spec + "' needs " + key);
    return parsed.number(key, 0.0);
  };
  for (const auto& [key, value] : parsed.params)
    if (key != "M" && key != "a" && key != "b" && key != "K" && key != "horizon")
      throw Error("control '" + spec + "': unknown parameter '" + key + "'");
  if (parsed.family == "power")
    return ControlModel::power(require("M"), require("b"), parsed.number("horizon", 1.0));
  if (parsed.family == "power_log")
    return ControlModel::power_log(require("M"), require("a"), require("b"), parsed.number("horizon", 1.0));
  if (parsed.family == "reference") return ControlModel::reference_rcd(require("K"), parsed.number("M", 1.0));
  throw Error("unknown control spec '" + spec + "' (fit, power:, power_log:, reference:, file:)");
}

std::string sweep_table(const SmoothingProfile& profile) {
  std::string out = "t,c_star,C_star,theta\n";
  for (std::size_t i = 0; i < profile.grid().size(); ++i)
    out += fmt17(profile.grid()[i]) + "," + fmt17(profile.c_star_values()[i]) + "," +
           fmt17(profile.primitive_values()[i]) + "," + fmt17(profile.theta_values()[i]) + "\n";
  return out;
}

std::string summary_text(const ScenarioConfig& config, const HeatOperator& heat, const SuiteResult& result) {
  std::map<ReportStatus, int> counts;
  for (const auto& r : result.reports) ++counts[r.status];
  std::ostringstream out;
  out << "space " << config.space << " (n=" << heat.size() << ")\n";
  out << "seed " << config.seed << ", samples " << config.samples << ", t_grid " << config.t_grid << "\n";
  out << "lambda1 " << fmt17(heat.eigenvalues()(1)) << "\n";
  out << "h1 " << fmt17(result.h1.value) << (result.h1.exact ? " (exact)" : " (sweep)") << " witness "
      << result.h1.witness.to_string() << "\n";
  out << "control " << result.control.to_json().dump() << "\n";
  out << "strong control " << result.strong_control.to_json().dump() << "\n\n";
  char line[256];
  for (const auto& r : result.reports) {
    std::snprintf(line, sizeof line, "%-40s %-12s slack %-24s\n", r.name.c_str(), to_string(r.status).c_str(),
                  fmt17(r.slack).c_str());
    out << line;
    if (auto it = r.notes.find("repro"); it != r.notes.end()) out << "    repro: " << it->second << "\n";
  }
  out << "\n";
  for (auto status : {ReportStatus::Passed, ReportStatus::Consistency, ReportStatus::Trivial, ReportStatus::Skipped,
                      ReportStatus::Failed})
    out << to_string(status) << " " << counts[status] << "\n";
  out << (result.all_passed() ? "OK" : "FAILED") << "\n";
  return out.str();
}

ScenarioOutcome run_scenario(const ScenarioConfig& config) {
  const GeneratedSpace generated = resolve_space(config.space);
  const HeatOperator heat(generated.space, generated.dirichlet);
  SuiteOptions options;
  options.seed = config.seed;
  options.t_grid = parse_t_grid(config.t_grid);
  options.samples = config.samples;
  options.groups = parse_groups(config.suite);
  options.control = parse_control_spec(config.control);
  options.fit_b = config.fit_b;
  options.space_label = config.space;

  ScenarioOutcome outcome{0, run_suite(heat, options), {}};
  outcome.exit_code = outcome.result.all_passed() ? 0 : 1;

  const SmoothingProfile profile(heat, options.t_grid);
  const std::vector<std::pair<std::string, std::string>> files{
      {"config.txt", serialize_config(config)},
      {"report.json", reports_to_json(outcome.result.reports)},
      {"report.csv", reports_to_csv(outcome.result.reports)},
      {"sweep.csv", sweep_table(profile)},
      {"control.json", outcome.result.control.to_json().dump(1) + "\n"},
      {"summary.txt", summary_text(config, heat, outcome.result)}};
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) throw Error("cannot create output directory " + config.out + ": " + ec.message());
  for (const auto& [name, text] : files) {
    const std::string path = (std::filesystem::path(config.out) / name).string();
    write_text_file(path, text);
    outcome.files.push_back(path);
  }
  return outcome;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace semlab
