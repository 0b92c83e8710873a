#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace semlab {

// c(t) <= M / t^b
struct PowerControl {
  double M = 1.0;
  double b = 0.5;
};

// c(t) <= M (1 + |log t|)^a / t^b
struct PowerLogControl {
  double M = 1.0;
  double a = 0.0;
  double b = 0.5;
};

// Step envelope through (t_i, c_i): c_i on [t_i, t_{i+1}), c_0 left of t_0,
// last value beyond the last node. Values are replaced by their
// non-increasing upper envelope.
struct TabulatedControl {
  std::vector<double> t;
  std::vector<double> c;
};

// c(t) = M sqrt(j_K(t)), j_K(t) = K / (exp(2Kt) - 1), j_0(t) = 1/(2t).
struct ReferenceRcdControl {
  double K = 0.0;
  double M = 1.0;
};

double j_K(double K, double t);

inline constexpr double kUnboundedHorizon = std::numeric_limits<double>::infinity();

class ControlModel {
 public:
  using Variant = std::variant<PowerControl, PowerLogControl, TabulatedControl, ReferenceRcdControl>;

  // horizon: the bound is asserted on (0, horizon]. Defaults to 1 for the
  // power families and to the whole half-line otherwise.
  explicit ControlModel(Variant variant, std::optional<double> horizon = std::nullopt);

  static ControlModel power(double M, double b, double horizon = 1.0);
  static ControlModel power_log(double M, double a, double b, double horizon = 1.0);
  static ControlModel tabulated(std::vector<double> t, std::vector<double> c);
  static ControlModel reference_rcd(double K, double M);

  const Variant& variant() const { return variant_; }
  double horizon() const { return horizon_; }
  bool strong() const { return horizon_ == kUnboundedHorizon; }
  std::string kind() const;
  const PowerControl* as_power() const { return std::get_if<PowerControl>(&variant_); }

  // c(t); throws for t <= 0 or t beyond the horizon.
  double eval(double t) const;
  // C(t) = int_0^t c(s) ds.
  double primitive(double t) const;

  nlohmann::json to_json() const;
  static ControlModel from_json(const nlohmann::json& j);

 private:
  Variant variant_;
  double horizon_;
};

// M~ = M / (1 - b).
double m_tilde(const PowerControl& p);

// Power envelope of samples (t_i, c_i) with t_i in (0, 1]: for each b on the
// grid {0.05, ..., 0.95} take M(b) = max_i c_i t_i^b and keep the smallest
// M(b), ties to the smallest b. fixed_b skips the search.
ControlModel fit_power_control(const std::vector<std::pair<double, double>>& samples,
                               std::optional<double> fixed_b = std::nullopt);

// Smallest T in (0, 1] with (1 - log T)^a = T^{-eps}.
double log_threshold_T(double a, double eps);

// Power(M, b + eps) on (0, T] with T = log_threshold_T(a, eps).
ControlModel power_from_log(const PowerLogControl& control, double eps);

ControlModel load_control_file(const std::string& path);
void save_control_file(const std::string& path, const ControlModel& control);

// Two-column numeric text (t, c). Lines starting with a letter or '#' are skipped.
std::vector<std::pair<double, double>> read_samples(const std::string& path);
std::string format_samples(const std::vector<std::pair<double, double>>& samples);

}  // namespace semlab
