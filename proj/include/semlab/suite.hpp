#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semlab/controls.hpp"
#include "semlab/heat.hpp"
#include "semlab/inequalities.hpp"
#include "semlab/spectral.hpp"

namespace semlab {

// Check groups: smoothing, contraction, interpolation, poincare, perimeter,
// indeterminacy, eigen, buser, transport_sobolev, model, horizon, structure.
const std::vector<std::string>& suite_groups();

struct SuiteOptions {
  std::uint64_t seed = 0;
  std::vector<double> t_grid = log_grid();
  int samples = 100;                    // random instances per check
  std::vector<std::string> groups;      // empty: all groups
  std::optional<ControlModel> control;  // power control on (0, 1]; fitted to c_star when absent
  std::optional<double> fit_b;          // fixed exponent for the fit
  std::string space_label;              // echoed in reproduction descriptors
  int threads = 0;                      // 0: SEMLAB_THREADS, else hardware concurrency
};

struct SuiteResult {
  // One aggregated report per check name (worst instance), sorted by name.
  std::vector<InequalityReport> reports;
  ControlModel control;
  ControlModel strong_control;
  CheegerResult h1;
  // True iff no report has status failed.
  bool all_passed() const;
};

// Parse "all" or a comma-separated list of group names.
std::vector<std::string> parse_groups(const std::string& text);

SuiteResult run_suite(const HeatOperator& heat, const SuiteOptions& options);

}  // namespace semlab
