#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "semlab/controls.hpp"
#include "semlab/heat.hpp"
#include "semlab/spectral.hpp"

namespace semlab {

enum class ReportStatus { Passed, Failed, Skipped, Trivial, Consistency };
std::string to_string(ReportStatus status);

inline constexpr double kSlackTolerance = 1e-9;
inline constexpr double kEqualityTolerance = 1e-12;

// One instance of an inequality, always oriented as lhs <= rhs.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  std::optional<double> t_used;
  std::map<std::string, double> params;
  std::map<std::string, std::string> notes;
  bool pass = false;      // slack >= -1e-9 (1 + |lhs| + |rhs|)
  bool equality = false;  // |slack| <= 1e-12 (1 + |lhs| + |rhs|)
  ReportStatus status = ReportStatus::Failed;

  double scale() const;
  // Pass unless the status records an error or a genuine violation.
  bool ok() const { return status != ReportStatus::Failed; }
};

InequalityReport make_report(std::string name, double lhs, double rhs,
                             std::optional<double> t_used = std::nullopt);
InequalityReport trivial_report(std::string name, std::string reason);
InequalityReport skipped_report(std::string name, std::string reason);

nlohmann::json report_to_json(const InequalityReport& report);
// Reports sorted by name; stable for equal names.
std::string reports_to_json(std::vector<InequalityReport> reports);
// Columns: name,lhs,rhs,slack,t_used,pass,status
std::string reports_to_csv(std::vector<InequalityReport> reports);

// The smoothing bound c(t) and its primitive C(t) used by a check: the
// measured c_star / C_star of the heat operator, or a control model. theta is
// always the measured one.
class SmoothingBound {
 public:
  explicit SmoothingBound(const SmoothingProfile& profile) : profile_(&profile) {}
  SmoothingBound(const SmoothingProfile& profile, ControlModel control)
      : profile_(&profile), control_(std::move(control)) {}

  const SmoothingProfile& profile() const { return *profile_; }
  const HeatOperator& heat() const { return profile_->heat(); }
  bool measured() const { return !control_.has_value(); }
  const std::optional<ControlModel>& control() const { return control_; }
  std::string label() const { return control_ ? control_->kind() : "measured"; }

  double c(double t) const;
  double C(double t) const;
  double theta(double t) const { return profile_->theta(t); }
  // c(t) >= c_star(t) and C(t) >= C_star(t); always true when measured.
  bool dominates_at(double t) const;

 private:
  const SmoothingProfile* profile_;
  std::optional<ControlModel> control_;
};

// W1(f+ m, f- m) for a mean-zero f.
double w1_of_parts(const MetricMeasureSpace& space, const Density& f);

// ---- implicit statements (any valid bound, typically measured) -------------

// ||H_t(f0 - f1)||_1 <= c(t) W1(f0 m, f1 m), f0, f1 >= 0 of equal mass.
InequalityReport check_w1_smoothing(const SmoothingBound& bound, double t, const Density& f0,
                                    const Density& f1);
// ||H_t(f0 - f1)||_1 <= max{c(t), 1} BL*(f0 m, f1 m), f0, f1 >= 0.
InequalityReport check_bl_smoothing(const SmoothingBound& bound, double t, const Density& f0,
                                    const Density& f1);
// ||f||_2^2 - ||H_{t/2} f||_2^2 <= C(t) ||f||_inf TV(f).
InequalityReport check_quant_contraction(const SmoothingBound& bound, double t, const Density& f);
// ||f||_2^2 <= min over the grid of theta(t/2) ||f||_1^2 + C(t) ||f||_inf TV(f).
InequalityReport check_interpolation(const SmoothingBound& bound, const Density& f);
// ||f - H_t f||_1 <= C(t) TV(f).
InequalityReport check_caloric_poincare(const SmoothingBound& bound, double t, const Density& f);
// int_{A^c} H_t chi_A <= C(t) Per(A) / 2, and
// int sqrt(H_t f+ H_t f-) <= sqrt(C(t) ||f||_inf ||f||_1 Per({f > 0})).
std::pair<InequalityReport, InequalityReport> check_perimeter_lemmas(const SmoothingBound& bound, double t,
                                                                     const SubsetIndicator& set,
                                                                     const Density& f);
// ||f||_1 <= c(t) W1(f+ m, f- m) + 2 sqrt(C(t) ||f||_inf ||f||_1 Per({f > 0})), f mean-zero.
InequalityReport check_indeterminacy_implicit(const SmoothingBound& bound, double t, const Density& f);
// For the eigenfunction phi_k (k >= 1), lambda = lambda_k:
//   nodal:  (1 - e^{-lambda t})^2 ||f||_1 / (4 C(t)) <= Per({f > 0}) ||f||_inf
//   W1:     e^{-lambda t} ||f||_1 / c(t) <= W1(f+ m, f- m)
std::vector<InequalityReport> check_eigen_implicit(const SmoothingBound& bound, Index k, double t);
// The same at several times, sharing one transport solve; reports alternate nodal, W1.
std::vector<InequalityReport> check_eigen_implicit(const SmoothingBound& bound, Index k,
                                                   const std::vector<double>& times);
// sup over the grid of e^{-lambda t} (1 - e^{-lambda t})^2 / (4 theta(t) C(t)) <= Per({phi_k > 0}).
InequalityReport check_eigen_ultracontractive(const SmoothingBound& bound, Index k);
// sup over the grid of (1 - e^{-lambda_1 t}) / C(t) <= h1.
InequalityReport check_buser_implicit(const SmoothingBound& bound, const CheegerResult& h1);
// ||f||_1 <= c(t) W1(f+ m, f- m) + C(t) TV(f), f mean-zero.
InequalityReport check_transport_sobolev_implicit(const SmoothingBound& bound, double t, const Density& f);

// ---- explicit statements for a power control (M, b) on (0, T] -------------
//
// The constants are assembled from (M, b, T) and the instance data; every
// time choice t of the argument is scaled into (0, T]. Each report records
// whether the control dominates the measured c_star and C_star at the time
// actually used.

// W1(f+ m, f- m) >= [theta'^b (h1/2)^{b/(1-b)} / (2M)] R^{b/(1-b)} ||f||_1,
// R = ||f||_1 / (||f||_inf Per({f > 0})), theta' = T min{1, (2 sqrt(2 M~ h1))^{-2/(1-b)}}.
InequalityReport check_indeterminacy_explicit(const SmoothingProfile& profile, const ControlModel& control,
                                              const CheegerResult& h1, const Density& f);
// With l' = T lambda_tilde and lambda_k >= lambda_tilde:
//   nodal: Per({f > 0}) >= (1 - e^{-l'})^2 / (4 M~ l'^{1-b}) lambda^{1-b} ||f||_1 / ||f||_inf
//   Stein: W1(f+ m, f- m) >= e^{-l'} l'^b / M lambda^{-b} ||f||_1
std::vector<InequalityReport> check_eigen_explicit(const SmoothingProfile& profile, const ControlModel& control,
                                                   Index k, double lambda_tilde);
// lambda_1 <= max{C1 h1, C2 h1^{1/(1-b)}}, C1 = M~ T^{1-b} / (1 - e^{-T}), C2 = C1^{1/(1-b)}.
// params["branch_bound"] holds the lower bound for h1 of the branch taken.
InequalityReport check_buser_explicit(const SmoothingProfile& profile, const ControlModel& control,
                                      const CheegerResult& h1);
// ||f||_1 <= (M + M~) W1(f+ m, f- m)^{1-b} TV(f)^b; the control must hold on (0, inf).
InequalityReport check_transport_sobolev_explicit(const SmoothingProfile& profile, const ControlModel& control,
                                                  const Density& f);

// Power(M, b) on (0, inf) with M = max t^b c_star(t) over a log grid on
// [1e-4, t_max]; c_star decays exponentially, so the grid covers the maximum.
ControlModel fit_strong_power_control(const HeatOperator& heat, double b, double t_max);

}  // namespace semlab
