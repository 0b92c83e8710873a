#include "semlab/controls.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "semlab/format.hpp"
#include "semlab/space.hpp"

namespace semlab {

double j_K(double K, double t) {
  if (!(t > 0.0)) throw Error("j_K needs t > 0");
  if (K == 0.0) return 0.5 / t;
  return K / std::expm1(2.0 * K * t);
}

double m_tilde(const PowerControl& p) { return p.M / (1.0 - p.b); }

namespace {

void require_exponent(double b) {
  if (!(b > 0.0 && b < 1.0)) throw Error("control exponent b must lie in (0, 1)");
}

struct Validate {
  void operator()(const PowerControl& p) const {
    if (!(p.M >= 0.0) || !std::isfinite(p.M)) throw Error("power control needs M >= 0");
    require_exponent(p.b);
  }
  void operator()(const PowerLogControl& p) const {
    if (!(p.M >= 0.0) || !std::isfinite(p.M)) throw Error("power-log control needs M >= 0");
    if (!(p.a >= 0.0) || !std::isfinite(p.a)) throw Error("power-log control needs a >= 0");
    require_exponent(p.b);
  }
  void operator()(TabulatedControl& p) const {
    if (p.t.empty() || p.t.size() != p.c.size())
      throw Error("tabulated control needs matching, non-empty t and c arrays");
    for (std::size_t i = 0; i < p.t.size(); ++i) {
      if (!(p.t[i] > 0.0) || !(p.c[i] > 0.0) || !std::isfinite(p.t[i]) || !std::isfinite(p.c[i]))
        throw Error("tabulated control entries must be positive and finite");
      if (i > 0 && !(p.t[i] > p.t[i - 1])) throw Error("tabulated control times must increase strictly");
    }
    for (std::size_t i = p.c.size() - 1; i-- > 0;) p.c[i] = std::max(p.c[i], p.c[i + 1]);
  }
  void operator()(const ReferenceRcdControl& p) const {
    if (!std::isfinite(p.K)) throw Error("reference control needs a finite K");
    if (!(p.M >= 1.0) || !std::isfinite(p.M)) throw Error("reference control needs M >= 1");
  }
};

double default_horizon(const ControlModel::Variant& v) {
  return std::holds_alternative<PowerControl>(v) || std::holds_alternative<PowerLogControl>(v)
             ? 1.0
             : kUnboundedHorizon;
}

}  // namespace

ControlModel::ControlModel(Variant variant, std::optional<double> horizon)
    : variant_(std::move(variant)), horizon_(horizon.value_or(default_horizon(variant_))) {
  std::visit(Validate{}, variant_);
  if (!(horizon_ > 0.0)) throw Error("control horizon must be positive");
  if (std::holds_alternative<PowerLogControl>(variant_) && horizon_ > 1.0)
    throw Error("power-log controls are only defined on (0, 1]");
}

ControlModel ControlModel::power(double M, double b, double horizon) {
  return ControlModel(PowerControl{M, b}, horizon);
}

ControlModel ControlModel::power_log(double M, double a, double b, double horizon) {
  return ControlModel(PowerLogControl{M, a, b}, horizon);
}

ControlModel ControlModel::tabulated(std::vector<double> t, std::vector<double> c) {
  return ControlModel(TabulatedControl{std::move(t), std::move(c)});
}

ControlModel ControlModel::reference_rcd(double K, double M) {
  return ControlModel(ReferenceRcdControl{K, M});
}

std::string ControlModel::kind() const {
  switch (variant_.index()) {
    case 0: return "power";
    case 1: return "power_log";
    case 2: return "tabulated";
    default: return "reference_rcd";
  }
}

double ControlModel::eval(double t) const {
  if (!(t > 0.0)) throw Error("control evaluated at t <= 0");
  if (t > horizon_) throw Error("control evaluated beyond its horizon " + fmt17(horizon_));
  struct Eval {
    double t;
    double operator()(const PowerControl& p) const { return p.M / std::pow(t, p.b); }
    double operator()(const PowerLogControl& p) const {
      return p.M * std::pow(1.0 + std::abs(std::log(t)), p.a) / std::pow(t, p.b);
    }
    double operator()(const TabulatedControl& p) const {
      const auto it = std::upper_bound(p.t.begin(), p.t.end(), t);
      if (it == p.t.begin()) return p.c.front();
      return p.c[static_cast<std::size_t>(it - p.t.begin()) - 1];
    }
    double operator()(const ReferenceRcdControl& p) const { return p.M * std::sqrt(j_K(p.K, t)); }
  };
  return std::visit(Eval{t}, variant_);
}

double ControlModel::primitive(double t) const {
  if (!(t >= 0.0)) throw Error("control primitive needs t >= 0");
  if (t > horizon_) throw Error("control primitive requested beyond its horizon " + fmt17(horizon_));
  if (t == 0.0) return 0.0;
  struct Primitive {
    double t;
    double operator()(const PowerControl& p) const { return m_tilde(p) * std::pow(t, 1.0 - p.b); }
    // With s = t e^{-v}: M t^{1-b} int_0^inf (c + v)^a e^{-(1-b) v} dv, c = 1 - log t,
    // which is an upper incomplete gamma function.
    double operator()(const PowerLogControl& p) const {
      const double k = 1.0 - p.b;
      const double c = 1.0 - std::log(t);
      if (p.a == 0.0) return p.M * std::pow(t, k) / k;
      const double tail = boost::math::tgamma(p.a + 1.0, k * c);
      return p.M * std::pow(t, k) * std::exp(k * c) * std::pow(k, -p.a - 1.0) * tail;
    }
    double operator()(const TabulatedControl& p) const {
      double acc = 0.0, left = 0.0;
      for (std::size_t i = 0; i < p.t.size() && left < t; ++i) {
        const double right = std::min(t, p.t[i]);
        const double value = i == 0 ? p.c[0] : p.c[i - 1];
        acc += value * (right - left);
        left = right;
      }
      if (left < t) acc += p.c.back() * (t - left);
      return acc;
    }
    // With s = u^2 the integrand 2u M sqrt(j_K(u^2)) stays bounded at 0.
    double operator()(const ReferenceRcdControl& p) const {
      auto f = [&p](double u) {
        if (u <= 0.0) return p.M * std::sqrt(2.0);
        return 2.0 * u * p.M * std::sqrt(j_K(p.K, u * u));
      };
      double error = 0.0;
      return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, std::sqrt(t), 20,
                                                                            1e-12, &error);
    }
  };
  return std::visit(Primitive{t}, variant_);
}

nlohmann::json ControlModel::to_json() const {
  nlohmann::json j;
  j["variant"] = kind();
  struct Fields {
    nlohmann::json& j;
    void operator()(const PowerControl& p) const {
      j["M"] = p.M;
      j["b"] = p.b;
    }
    void operator()(const PowerLogControl& p) const {
      j["M"] = p.M;
      j["a"] = p.a;
      j["b"] = p.b;
    }
    void operator()(const TabulatedControl& p) const {
      j["t"] = p.t;
      j["c"] = p.c;
    }
    void operator()(const ReferenceRcdControl& p) const {
      j["K"] = p.K;
      j["M"] = p.M;
    }
  };
  std::visit(Fields{j}, variant_);
  j["horizon"] = strong() ? nlohmann::json(nullptr) : nlohmann::json(horizon_);
  return j;
}

ControlModel ControlModel::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("control description must be an object");
  if (!j.contains("variant") || !j["variant"].is_string()) throw Error("control description needs a variant");
  const std::string variant = j["variant"];
  std::vector<std::string> allowed{"variant", "horizon"};
  auto number = [&j](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) throw Error(std::string("control field '") + key + "' missing or not a number");
    return j[key].get<double>();
  };
  std::optional<double> horizon;
  if (j.contains("horizon") && !j["horizon"].is_null()) {
    if (!j["horizon"].is_number()) throw Error("control field 'horizon' must be a number or null");
    horizon = j["horizon"].get<double>();
  } else if (j.contains("horizon")) {
    horizon = kUnboundedHorizon;
  }
  std::optional<ControlModel> out;
  if (variant == "power") {
    allowed.insert(allowed.end(), {"M", "b"});
    out.emplace(PowerControl{number("M"), number("b")}, horizon);
  } else if (variant == "power_log") {
    allowed.insert(allowed.end(), {"M", "a", "b"});
    out.emplace(PowerLogControl{number("M"), number("a"), number("b")}, horizon);
  } else if (variant == "tabulated") {
    allowed.insert(allowed.end(), {"t", "c"});
    if (!j.contains("t") || !j.contains("c")) throw Error("tabulated control needs arrays 't' and 'c'");
    try {
      out.emplace(TabulatedControl{j["t"].get<std::vector<double>>(), j["c"].get<std::vector<double>>()},
                  horizon);
    } catch (const nlohmann::json::exception&) {
      throw Error("tabulated control arrays must hold numbers");
    }
  } else if (variant == "reference_rcd") {
    allowed.insert(allowed.end(), {"K", "M"});
    out.emplace(ReferenceRcdControl{number("K"), number("M")}, horizon);
  } else {
    throw Error("unknown control variant '" + variant + "'");
  }
  for (const auto& item : j.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw Error("unknown control field '" + item.key() + "'");
  return *out;
}

ControlModel fit_power_control(const std::vector<std::pair<double, double>>& samples,
                               std::optional<double> fixed_b) {
  if (samples.empty()) throw Error("cannot fit a control to an empty sample set");
  for (const auto& [t, c] : samples) {
    if (!(t > 0.0 && t <= 1.0)) throw Error("control samples need times in (0, 1]");
    if (!(c > 0.0) || !std::isfinite(c)) throw Error("control samples need positive values");
  }
  // Raised by ulps until M / t^b, evaluated as in eval(), covers every sample.
  auto envelope = [&samples](double b) {
    double M = 0.0;
    for (const auto& [t, c] : samples) M = std::max(M, c * std::pow(t, b));
    for (const auto& [t, c] : samples)
      while (M / std::pow(t, b) < c) M = std::nextafter(M, std::numeric_limits<double>::infinity());
    return M;
  };
  if (fixed_b) {
    require_exponent(*fixed_b);
    return ControlModel::power(envelope(*fixed_b), *fixed_b);
  }
  double best_b = 0.0, best_M = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 19; ++k) {
    const double b = k / 20.0;
    const double M = envelope(b);
    if (M < best_M * (1.0 - 1e-12)) {
      best_M = M;
      best_b = b;
    }
  }
  return ControlModel::power(best_M, best_b);
}

double log_threshold_T(double a, double eps) {
  if (!(a >= 0.0) || !(eps > 0.0)) throw Error("log_threshold_T needs a >= 0 and eps > 0");
  if (a <= eps) return 1.0;
  // g(u) = a log(1 + u) - eps u with u = -log T is concave, zero at 0 and
  // positive up to its single root beyond the maximizer a/eps - 1.
  auto g = [a, eps](double u) { return a * std::log1p(u) - eps * u; };
  double lo = a / eps - 1.0, hi = 2.0 * lo + 1.0;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  // Finish on T itself so the root is resolved to the last bit of T; keep the
  // side where the bound (1 - log T)^a <= T^{-eps} holds.
  auto h = [a, eps](double T) { return a * std::log1p(-std::log(T)) + eps * std::log(T); };
  double t_lo = std::exp(-hi), t_hi = std::exp(-lo);
  while (h(t_lo) > 0.0) t_lo *= 0.5;
  while (h(t_hi) <= 0.0 && t_hi < 1.0) t_hi = std::min(1.0, t_hi * 2.0);
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (mid <= t_lo || mid >= t_hi) break;
    (h(mid) > 0.0 ? t_hi : t_lo) = mid;
  }
  while (std::pow(1.0 - std::log(t_lo), a) > std::pow(t_lo, -eps)) t_lo = std::nextafter(t_lo, 0.0);
  return t_lo;
}

ControlModel power_from_log(const PowerLogControl& control, double eps) {
  if (!(eps > 0.0) || control.b + eps >= 1.0) throw Error("need 0 < eps < 1 - b");
  return ControlModel::power(control.M, control.b + eps, log_threshold_T(control.a, eps));
}

ControlModel load_control_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open control file " + path);
  try {
    return ControlModel::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("control file " + path + ": " + e.what());
  } catch (const Error& e) {
    throw Error("control file " + path + ": " + e.what());
  }
}

void save_control_file(const std::string& path, const ControlModel& control) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write control file " + path);
  out << control.to_json().dump(1) << '\n';
}

std::vector<std::pair<double, double>> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open samples file " + path);
  std::vector<std::pair<double, double>> samples;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::replace(line.begin(), line.end(), ',', ' ');
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || std::isalpha(static_cast<unsigned char>(line[first])))
      continue;
    std::istringstream fields(line);
    double t = 0.0, c = 0.0;
    if (!(fields >> t >> c))
      throw Error(path + ":" + std::to_string(number) + ": expected two numbers");
    samples.emplace_back(t, c);
  }
  return samples;
}

std::string format_samples(const std::vector<std::pair<double, double>>& samples) {
  std::string out = "t,c_star\n";
  for (const auto& [t, c] : samples) out += fmt17(t) + "," + fmt17(c) + "\n";
  return out;
}

}  // namespace semlab
