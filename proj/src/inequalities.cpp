#include "semlab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "semlab/format.hpp"
#include "semlab/transport.hpp"

namespace semlab {

std::string to_string(ReportStatus status) {
  switch (status) {
    case ReportStatus::Passed: return "passed";
    case ReportStatus::Failed: return "failed";
    case ReportStatus::Skipped: return "skipped";
    case ReportStatus::Trivial: return "trivial";
    case ReportStatus::Consistency: return "consistency";
  }
  return "failed";
}

double InequalityReport::scale() const { return 1.0 + std::abs(lhs) + std::abs(rhs); }

InequalityReport make_report(std::string name, double lhs, double rhs, std::optional<double> t_used) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.t_used = t_used;
  r.pass = std::isfinite(r.slack) ? r.slack >= -kSlackTolerance * r.scale() : rhs == kUnboundedHorizon;
  r.equality = std::abs(r.slack) <= kEqualityTolerance * r.scale();
  r.status = r.pass ? ReportStatus::Passed : ReportStatus::Failed;
  return r;
}

InequalityReport trivial_report(std::string name, std::string reason) {
  InequalityReport r = make_report(std::move(name), 0.0, 0.0);
  r.status = ReportStatus::Trivial;
  r.notes["reason"] = std::move(reason);
  return r;
}

InequalityReport skipped_report(std::string name, std::string reason) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = r.rhs = r.slack = std::nan("");
  r.pass = true;
  r.status = ReportStatus::Skipped;
  r.notes["reason"] = std::move(reason);
  return r;
}

nlohmann::json report_to_json(const InequalityReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["t_used"] = r.t_used ? nlohmann::json(*r.t_used) : nlohmann::json(nullptr);
  j["pass"] = r.pass;
  j["equality"] = r.equality;
  j["status"] = to_string(r.status);
  j["params"] = r.params;
  j["notes"] = r.notes;
  return j;
}

namespace {

void sort_reports(std::vector<InequalityReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const InequalityReport& a, const InequalityReport& b) { return a.name < b.name; });
}

}  // namespace

std::string reports_to_json(std::vector<InequalityReport> reports) {
  sort_reports(reports);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr.dump(1) + "\n";
}

std::string reports_to_csv(std::vector<InequalityReport> reports) {
  sort_reports(reports);
  std::string out = "name,lhs,rhs,slack,t_used,pass,status\n";
  for (const auto& r : reports) {
    out += r.name + "," + fmt17(r.lhs) + "," + fmt17(r.rhs) + "," + fmt17(r.slack) + "," +
           (r.t_used ? fmt17(*r.t_used) : std::string()) + "," + (r.pass ? "1" : "0") + "," +
           to_string(r.status) + "\n";
  }
  return out;
}

double SmoothingBound::c(double t) const { return control_ ? control_->eval(t) : profile_->c_star(t); }

double SmoothingBound::C(double t) const { return control_ ? control_->primitive(t) : profile_->primitive(t); }

bool SmoothingBound::dominates_at(double t) const {
  if (!control_) return true;
  if (t > control_->horizon()) return false;
  const double tol = 1.0 - 1e-12;
  return control_->eval(t) >= tol * profile_->c_star(t) && control_->primitive(t) >= tol * profile_->primitive(t);
}

double w1_of_parts(const MetricMeasureSpace& space, const Density& f) {
  return w1(space, AtomicMeasure::from_density(space, positive_part(f)),
            AtomicMeasure::from_density(space, negative_part(f)))
      .value;
}

namespace {

constexpr double kTimeTol = 1e-12;

// A failing instance under an unverified control is not a counterexample.
void apply_control_status(InequalityReport& r, const SmoothingBound& bound, double t) {
  if (bound.measured()) return;
  const bool dominates = bound.dominates_at(t);
  r.params["control_dominates"] = dominates ? 1.0 : 0.0;
  r.notes["bound"] = bound.label();
  if (!r.pass && !dominates) r.status = ReportStatus::Consistency;
}

void require_time(double t, bool allow_zero) {
  if (!(allow_zero ? t >= 0.0 : t > 0.0) || !std::isfinite(t))
    throw Error(allow_zero ? "time must be >= 0" : "time must be > 0");
}

bool is_zero(const Density& f) { return f.cwiseAbs().maxCoeff() == 0.0; }

void require_nonnegative(const Density& f, const char* what) {
  if (f.minCoeff() < 0.0) throw Error(std::string(what) + " needs nonnegative densities");
}

// lambda_k, phi_k and the heated-eigenfunction L^1 identity at t.
struct Eigen {
  double lambda;
  Density f;
  int multiplicity;
};

Eigen eigenpair(const HeatOperator& heat, Index k) {
  if (k < 1 || k >= heat.size()) throw Error("eigen bounds need 1 <= k < n");
  const double lambda = heat.eigenvalues()(k);
  if (!(lambda > 0.0)) throw Error("eigen bounds need a positive eigenvalue");
  int mult = 0;
  for (Index i = 0; i < heat.size(); ++i)
    if (std::abs(heat.eigenvalues()(i) - lambda) <= 1e-9 * (1.0 + lambda)) ++mult;
  return {lambda, heat.eigenvectors().col(k), mult};
}

void assert_norm1heat(const HeatOperator& heat, const Eigen& e, double t) {
  const auto& space = heat.space();
  const double l1 = l1_norm(space, e.f);
  const double heated = l1_norm(space, heat.apply(t, e.f));
  if (std::abs(heated - std::exp(-e.lambda * t) * l1) > 1e-10 * l1)
    throw Error("heated eigenfunction identity violated beyond 1e-10");
}

const PowerControl& require_power(const ControlModel& control) {
  const PowerControl* p = control.as_power();
  if (!p) throw Error("explicit bounds need a power control (M, b)");
  if (!(p->M > 0.0)) throw Error("explicit bounds need M > 0");
  return *p;
}

// Largest T <= 1 on which the control is asserted.
double explicit_horizon(const ControlModel& control) { return std::min(1.0, control.horizon()); }

void record_power(InequalityReport& r, const PowerControl& p, double T) {
  r.params["M"] = p.M;
  r.params["b"] = p.b;
  r.params["M_tilde"] = m_tilde(p);
  r.params["T"] = T;
}

// c_star(t) <= M t^{-b} and C_star(t) <= M~ t^{1-b} at the time a proof uses.
bool power_dominates(const SmoothingProfile& profile, const PowerControl& p, double t) {
  const double tol = 1.0 + 1e-12;
  return profile.c_star(t) <= tol * p.M / std::pow(t, p.b) &&
         profile.primitive(t) <= tol * m_tilde(p) * std::pow(t, 1.0 - p.b);
}

void finish_explicit(InequalityReport& r, bool hypotheses_hold, bool exact_h1 = true) {
  r.params["control_dominates"] = hypotheses_hold ? 1.0 : 0.0;
  if (!exact_h1) r.notes["h1"] = "sweep upper bound";
  if (r.pass) r.status = exact_h1 ? ReportStatus::Passed : ReportStatus::Consistency;
  else r.status = hypotheses_hold && exact_h1 ? ReportStatus::Failed : ReportStatus::Consistency;
}

}  // namespace

InequalityReport check_w1_smoothing(const SmoothingBound& bound, double t, const Density& f0,
                                    const Density& f1) {
  require_time(t, false);
  require_nonnegative(f0, "W1 smoothing");
  require_nonnegative(f1, "W1 smoothing");
  const auto& space = bound.heat().space();
  const TransportCertificate cert =
      w1(space, AtomicMeasure::from_density(space, f0), AtomicMeasure::from_density(space, f1));
  const double lhs = l1_norm(space, bound.heat().apply(t, f0 - f1));
  const double c = bound.c(t);
  InequalityReport r = make_report("w1_smoothing", lhs, c * cert.value, t);
  r.params["c"] = c;
  r.params["W1"] = cert.value;
  r.params["duality_gap"] = cert.duality_gap;
  if (is_zero(f0 - f1)) r.status = ReportStatus::Trivial;
  apply_control_status(r, bound, t);
  return r;
}

InequalityReport check_bl_smoothing(const SmoothingBound& bound, double t, const Density& f0,
                                    const Density& f1) {
  require_time(t, false);
  require_nonnegative(f0, "BL smoothing");
  require_nonnegative(f1, "BL smoothing");
  const auto& space = bound.heat().space();
  const TransportCertificate cert =
      bl_star(space, AtomicMeasure::from_density(space, f0), AtomicMeasure::from_density(space, f1));
  const double lhs = l1_norm(space, bound.heat().apply(t, f0 - f1));
  const double c = std::max(bound.c(t), 1.0);
  InequalityReport r = make_report("bl_smoothing", lhs, c * cert.value, t);
  r.params["c_tilde"] = c;
  r.params["BL_star"] = cert.value;
  r.params["duality_gap"] = cert.duality_gap;
  if (is_zero(f0 - f1)) r.status = ReportStatus::Trivial;
  apply_control_status(r, bound, t);
  return r;
}

InequalityReport check_quant_contraction(const SmoothingBound& bound, double t, const Density& f) {
  require_time(t, true);
  const auto& heat = bound.heat();
  const auto& space = heat.space();
  const double norm2 = l2_norm(space, f);
  const double heated = l2_norm(space, heat.apply(0.5 * t, f));
  const double lhs = norm2 * norm2 - heated * heated;
  const double C = t == 0.0 ? 0.0 : bound.C(t);
  const double tv = total_variation(heat.dirichlet(), f);
  InequalityReport r = make_report("quant_contraction", lhs, C * linf_norm(f) * tv, t);
  r.params["C"] = C;
  r.params["TV"] = tv;
  if (is_zero(f) || tv == 0.0 || t == 0.0) r.status = ReportStatus::Trivial;
  if (t > 0.0) apply_control_status(r, bound, t);
  return r;
}

InequalityReport check_interpolation(const SmoothingBound& bound, const Density& f) {
  const auto& heat = bound.heat();
  const auto& space = heat.space();
  const double l1 = l1_norm(space, f), l2 = l2_norm(space, f), linf = linf_norm(f);
  const double tv = total_variation(heat.dirichlet(), f);
  double best = std::numeric_limits<double>::infinity(), best_t = 0.0;
  for (double t : bound.profile().grid()) {
    const double value = heat.theta(0.5 * t) * l1 * l1 + bound.C(t) * linf * tv;
    if (value < best) {
      best = value;
      best_t = t;
    }
  }
  InequalityReport r = make_report("interpolation", l2 * l2, best, best_t);
  r.params["theta_half_t"] = heat.theta(0.5 * best_t);
  r.params["C"] = bound.C(best_t);
  r.params["TV"] = tv;
  const auto& grid = bound.profile().grid();
  r.params["grid_boundary"] = (best_t == grid.front() || best_t == grid.back()) ? 1.0 : 0.0;
  if (is_zero(f)) r.status = ReportStatus::Trivial;
  apply_control_status(r, bound, best_t);
  return r;
}

InequalityReport check_caloric_poincare(const SmoothingBound& bound, double t, const Density& f) {
  require_time(t, true);
  const auto& heat = bound.heat();
  const double lhs = l1_norm(heat.space(), f - heat.apply(t, f));
  const double C = t == 0.0 ? 0.0 : bound.C(t);
  const double tv = total_variation(heat.dirichlet(), f);
  InequalityReport r = make_report("caloric_poincare", lhs, C * tv, t);
  r.params["C"] = C;
  r.params["TV"] = tv;
  if (tv == 0.0 || t == 0.0) r.status = ReportStatus::Trivial;
  if (t > 0.0) apply_control_status(r, bound, t);
  return r;
}

std::pair<InequalityReport, InequalityReport> check_perimeter_lemmas(const SmoothingBound& bound, double t,
                                                                     const SubsetIndicator& set,
                                                                     const Density& f) {
  require_time(t, false);
  const auto& heat = bound.heat();
  const auto& space = heat.space();
  if (set.size() != space.size()) throw Error("subset size does not match the space");
  const double C = bound.C(t);

  InequalityReport first;
  if (set.empty() || set.full()) {
    first = trivial_report("perimeter_set", "empty or full set");
    first.t_used = t;
  } else {
    const Density heated = heat.apply(t, set.indicator());
    double lhs = 0.0;
    for (Index x = 0; x < space.size(); ++x)
      if (!set.contains(x)) lhs += heated(x) * space.mass(x);
    const double per = perimeter(heat.dirichlet(), set);
    first = make_report("perimeter_set", lhs, 0.5 * C * per, t);
    first.params["C"] = C;
    first.params["Per"] = per;
    apply_control_status(first, bound, t);
  }

  InequalityReport second;
  if (is_zero(f)) {
    second = trivial_report("perimeter_product", "zero function");
    second.t_used = t;
  } else {
    const Density hp = heat.apply(t, positive_part(f)), hn = heat.apply(t, negative_part(f));
    double lhs = 0.0;
    for (Index x = 0; x < space.size(); ++x)
      lhs += std::sqrt(std::max(0.0, hp(x)) * std::max(0.0, hn(x))) * space.mass(x);
    const double per = perimeter(heat.dirichlet(), SubsetIndicator::from_predicate(f, true));
    const double rhs = std::sqrt(C * linf_norm(f) * l1_norm(space, f) * per);
    second = make_report("perimeter_product", lhs, rhs, t);
    second.params["C"] = C;
    second.params["Per_positive"] = per;
    if (f.minCoeff() >= 0.0 || f.maxCoeff() <= 0.0) second.status = ReportStatus::Trivial;
    apply_control_status(second, bound, t);
  }
  return {first, second};
}

InequalityReport check_indeterminacy_implicit(const SmoothingBound& bound, double t, const Density& f) {
  require_time(t, false);
  if (is_zero(f)) {
    InequalityReport r = trivial_report("indeterminacy_implicit", "zero function");
    r.t_used = t;
    return r;
  }
  const auto& heat = bound.heat();
  const auto& space = heat.space();
  require_mean_zero(space, f, "indeterminacy");
  const double l1 = l1_norm(space, f);
  const double w = w1_of_parts(space, f);
  const double per = perimeter(heat.dirichlet(), SubsetIndicator::from_predicate(f, true));
  const double c = bound.c(t), C = bound.C(t);
  const double rhs = c * w + 2.0 * std::sqrt(C * linf_norm(f) * l1 * per);
  InequalityReport r = make_report("indeterminacy_implicit", l1, rhs, t);
  r.params["c"] = c;
  r.params["C"] = C;
  r.params["W1"] = w;
  r.params["Per_positive"] = per;
  apply_control_status(r, bound, t);
  return r;
}

std::vector<InequalityReport> check_eigen_implicit(const SmoothingBound& bound, Index k, double t) {
  return check_eigen_implicit(bound, k, std::vector<double>{t});
}

std::vector<InequalityReport> check_eigen_implicit(const SmoothingBound& bound, Index k,
                                                   const std::vector<double>& times) {
  const auto& heat = bound.heat();
  const auto& space = heat.space();
  const Eigen e = eigenpair(heat, k);
  const double l1 = l1_norm(space, e.f), linf = linf_norm(e.f);
  const double per = perimeter(heat.dirichlet(), SubsetIndicator::from_predicate(e.f, true));
  const double w = w1_of_parts(space, e.f);
  std::vector<InequalityReport> out;
  for (double t : times) {
    require_time(t, false);
    assert_norm1heat(heat, e, t);
    const double decay = std::exp(-e.lambda * t);
    const double c = bound.c(t), C = bound.C(t);
    InequalityReport nodal =
        make_report("eigen_nodal_implicit", (1.0 - decay) * (1.0 - decay) * l1 / (4.0 * C), per * linf, t);
    InequalityReport transport = make_report("eigen_w1_implicit", decay * l1 / c, w, t);
    for (InequalityReport* r : {&nodal, &transport}) {
      r->params["k"] = static_cast<double>(k);
      r->params["lambda"] = e.lambda;
      r->params["multiplicity"] = e.multiplicity;
      r->params["c"] = c;
      r->params["C"] = C;
      apply_control_status(*r, bound, t);
      out.push_back(std::move(*r));
    }
  }
  return out;
}

InequalityReport check_eigen_ultracontractive(const SmoothingBound& bound, Index k) {
  const auto& heat = bound.heat();
  const Eigen e = eigenpair(heat, k);
  double best = 0.0, best_t = bound.profile().grid().front();
  for (double t : bound.profile().grid()) {
    const double decay = std::exp(-e.lambda * t);
    const double value = decay * (1.0 - decay) * (1.0 - decay) / (4.0 * bound.theta(t) * bound.C(t));
    if (value > best) {
      best = value;
      best_t = t;
    }
  }
  const double per = perimeter(heat.dirichlet(), SubsetIndicator::from_predicate(e.f, true));
  InequalityReport r = make_report("eigen_nodal_ultracontractive", best, per, best_t);
  r.params["k"] = static_cast<double>(k);
  r.params["lambda"] = e.lambda;
  r.params["multiplicity"] = e.multiplicity;
  r.params["theta"] = bound.theta(best_t);
  apply_control_status(r, bound, best_t);
  return r;
}

InequalityReport check_buser_implicit(const SmoothingBound& bound, const CheegerResult& h1) {
  const double lambda1 = bound.heat().eigenvalues()(1);
  double best = 0.0, best_t = bound.profile().grid().front();
  for (double t : bound.profile().grid()) {
    const double value = -std::expm1(-lambda1 * t) / bound.C(t);
    if (value > best) {
      best = value;
      best_t = t;
    }
  }
  InequalityReport r = make_report("buser_implicit", best, h1.value, best_t);
  r.params["lambda1"] = lambda1;
  r.params["h1"] = h1.value;
  r.params["h1_exact"] = h1.exact ? 1.0 : 0.0;
  r.notes["witness"] = h1.witness.to_string();
  const auto& grid = bound.profile().grid();
  r.params["grid_boundary"] = (best_t == grid.front() || best_t == grid.back()) ? 1.0 : 0.0;
  apply_control_status(r, bound, best_t);
  if (!h1.exact && r.pass) r.status = ReportStatus::Consistency;
  return r;
}

InequalityReport check_transport_sobolev_implicit(const SmoothingBound& bound, double t, const Density& f) {
  require_time(t, false);
  if (is_zero(f)) {
    InequalityReport r = trivial_report("transport_sobolev_implicit", "zero function");
    r.t_used = t;
    return r;
  }
  const auto& heat = bound.heat();
  const auto& space = heat.space();
  require_mean_zero(space, f, "transport-Sobolev");
  const double w = w1_of_parts(space, f);
  const double tv = total_variation(heat.dirichlet(), f);
  const double c = bound.c(t), C = bound.C(t);
  InequalityReport r = make_report("transport_sobolev_implicit", l1_norm(space, f), c * w + C * tv, t);
  r.params["c"] = c;
  r.params["C"] = C;
  r.params["W1"] = w;
  r.params["TV"] = tv;
  apply_control_status(r, bound, t);
  return r;
}

InequalityReport check_indeterminacy_explicit(const SmoothingProfile& profile, const ControlModel& control,
                                              const CheegerResult& h1, const Density& f) {
  if (is_zero(f)) return trivial_report("indeterminacy_explicit", "zero function");
  const PowerControl& p = require_power(control);
  const auto& heat = profile.heat();
  const auto& space = heat.space();
  require_mean_zero(space, f, "indeterminacy");
  if (!(h1.value > 0.0)) throw Error("explicit indeterminacy needs h1 > 0");
  const double T = explicit_horizon(control);
  const double b = p.b, Mt = m_tilde(p);
  const double l1 = l1_norm(space, f), linf = linf_norm(f);
  const double per = perimeter(heat.dirichlet(), SubsetIndicator::from_predicate(f, true));

  const double theta = std::min(1.0, std::pow(2.0 * std::sqrt(2.0 * Mt * h1.value), -2.0 / (1.0 - b)));
  const double theta_eff = T * theta;
  const double ratio = 2.0 * linf * per / (h1.value * l1);
  const double t = theta_eff * std::pow(ratio, 1.0 / (b - 1.0));
  const double R = l1 / (linf * per);
  const double constant = std::pow(theta_eff, b) * std::pow(0.5 * h1.value, b / (1.0 - b)) / (2.0 * p.M);
  const double w = w1_of_parts(space, f);

  InequalityReport r =
      make_report("indeterminacy_explicit", constant * std::pow(R, b / (1.0 - b)) * l1, w, t);
  record_power(r, p, T);
  r.params["theta"] = theta;
  r.params["constant"] = constant;
  r.params["residual_factor"] = 1.0 - std::pow(theta_eff, 0.5 * (1.0 - b)) * std::sqrt(2.0 * Mt * h1.value);
  r.params["h1"] = h1.value;
  r.params["W1"] = w;
  finish_explicit(r, t <= T * (1.0 + kTimeTol) && power_dominates(profile, p, t), h1.exact);
  return r;
}

std::vector<InequalityReport> check_eigen_explicit(const SmoothingProfile& profile, const ControlModel& control,
                                                   Index k, double lambda_tilde) {
  const PowerControl& p = require_power(control);
  const auto& heat = profile.heat();
  const auto& space = heat.space();
  const Eigen e = eigenpair(heat, k);
  if (!(lambda_tilde > 0.0)) throw Error("explicit eigen bounds need lambda_tilde > 0");
  if (e.lambda < lambda_tilde * (1.0 - kTimeTol)) throw Error("explicit eigen bounds need lambda >= lambda_tilde");
  const double T = explicit_horizon(control);
  const double b = p.b, Mt = m_tilde(p);
  const double lt = T * lambda_tilde;
  const double t = lt / e.lambda;
  assert_norm1heat(heat, e, t);
  const double l1 = l1_norm(space, e.f), linf = linf_norm(e.f);
  const double per = perimeter(heat.dirichlet(), SubsetIndicator::from_predicate(e.f, true));

  const double nodal_constant = std::pow(-std::expm1(-lt), 2) / (4.0 * Mt * std::pow(lt, 1.0 - b));
  InequalityReport nodal =
      make_report("eigen_nodal_explicit", nodal_constant * std::pow(e.lambda, 1.0 - b) * l1 / linf, per, t);
  nodal.params["constant"] = nodal_constant;

  const double stein_constant = std::exp(-lt) * std::pow(lt, b) / p.M;
  InequalityReport stein = make_report("eigen_stein_explicit", stein_constant * std::pow(e.lambda, -b) * l1,
                                       w1_of_parts(space, e.f), t);
  stein.params["constant"] = stein_constant;

  const bool valid = power_dominates(profile, p, t);
  for (InequalityReport* r : {&nodal, &stein}) {
    record_power(*r, p, T);
    r->params["k"] = static_cast<double>(k);
    r->params["lambda"] = e.lambda;
    r->params["lambda_tilde"] = lambda_tilde;
    r->params["multiplicity"] = e.multiplicity;
    finish_explicit(*r, valid);
  }
  return {nodal, stein};
}

InequalityReport check_buser_explicit(const SmoothingProfile& profile, const ControlModel& control,
                                      const CheegerResult& h1) {
  const PowerControl& p = require_power(control);
  const double lambda1 = profile.heat().eigenvalues()(1);
  const double T = explicit_horizon(control);
  const double b = p.b, Mt = m_tilde(p);
  const double C1 = Mt * std::pow(T, 1.0 - b) / -std::expm1(-T);
  const double C2 = std::pow(C1, 1.0 / (1.0 - b));
  const double rhs = std::max(C1 * h1.value, C2 * std::pow(h1.value, 1.0 / (1.0 - b)));
  const bool large = lambda1 >= 1.0;
  const double t = large ? T / lambda1 : T;

  InequalityReport r = make_report("buser_explicit", lambda1, rhs, t);
  record_power(r, p, T);
  r.params["C1"] = C1;
  r.params["C2"] = C2;
  r.params["h1"] = h1.value;
  r.params["lambda1"] = lambda1;
  r.params["branch_large_lambda"] = large ? 1.0 : 0.0;
  r.params["branch_bound"] = large ? std::pow(lambda1, 1.0 - b) / C1 : lambda1 / C1;
  r.params["branch_implicit"] = -std::expm1(-lambda1 * t) / (Mt * std::pow(t, 1.0 - b));
  finish_explicit(r, power_dominates(profile, p, t), h1.exact);
  return r;
}

InequalityReport check_transport_sobolev_explicit(const SmoothingProfile& profile, const ControlModel& control,
                                                  const Density& f) {
  if (is_zero(f)) return trivial_report("transport_sobolev_explicit", "zero function");
  const PowerControl& p = require_power(control);
  if (!control.strong()) throw Error("explicit transport-Sobolev needs a control on (0, inf)");
  const auto& heat = profile.heat();
  const auto& space = heat.space();
  require_mean_zero(space, f, "transport-Sobolev");
  const double b = p.b, Mt = m_tilde(p);
  const double w = w1_of_parts(space, f);
  const double tv = total_variation(heat.dirichlet(), f);
  const double t = w / tv;
  InequalityReport r = make_report("transport_sobolev_explicit", l1_norm(space, f),
                                   (p.M + Mt) * std::pow(w, 1.0 - b) * std::pow(tv, b), t);
  record_power(r, p, kUnboundedHorizon);
  r.params["W1"] = w;
  r.params["TV"] = tv;
  finish_explicit(r, power_dominates(profile, p, t));
  return r;
}

ControlModel fit_strong_power_control(const HeatOperator& heat, double b, double t_max) {
  const auto grid = log_grid(1e-4, std::max(1.0, t_max), 200);
  auto value = [&heat, b](double log_t) {
    const double t = std::exp(log_t);
    return std::pow(t, b) * heat.c_star(t);
  };
  std::vector<double> v;
  for (double t : grid) v.push_back(value(std::log(t)));
  double M = *std::max_element(v.begin(), v.end());
  // Polish every local grid maximum between its neighbours.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if ((i > 0 && v[i] < v[i - 1]) || (i + 1 < grid.size() && v[i] < v[i + 1])) continue;
    const double lo = std::log(grid[i > 0 ? i - 1 : i]), hi = std::log(grid[std::min(i + 1, grid.size() - 1)]);
    if (!(hi > lo)) continue;
    const auto best = boost::math::tools::brent_find_minima([&value](double s) { return -value(s); }, lo, hi, 52);
    M = std::max(M, -best.second);
  }
  return ControlModel::power(M, b, kUnboundedHorizon);
}

}  // namespace semlab
