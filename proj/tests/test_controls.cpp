#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oracles.hpp"
#include "semlab/controls.hpp"
#include "semlab/space.hpp"

using namespace semlab;

TEST_CASE("evaluation of the control families") {
  CHECK(ControlModel::reference_rcd(0.0, 1.0).eval(1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(ControlModel::power(2.0, 0.5).eval(0.25) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(ControlModel::power_log(2.0, 1.0, 0.5).eval(std::exp(-1.0)) ==
        doctest::Approx(2.0 * 2.0 * std::exp(0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(ControlModel::power(1.0, 0.5).eval(2.0), Error);
  CHECK_THROWS_AS(ControlModel::power(1.0, 0.5).eval(0.0), Error);
  CHECK_THROWS_AS(ControlModel::power(1.0, 1.0), Error);
  CHECK_THROWS_AS(ControlModel::reference_rcd(0.0, 0.5), Error);
  CHECK(ControlModel::reference_rcd(1.0, 1.0).strong());
  CHECK_FALSE(ControlModel::power(1.0, 0.5).strong());
}

TEST_CASE("j_K against its series near K = 0") {
  for (double K : {1e-8, -1e-8}) CHECK(std::abs(j_K(K, 1.0) - 0.5) <= 1e-6);
  for (double K : {1e-3, -2e-3, 5e-2}) {
    for (double t : {0.1, 1.0}) CHECK(j_K(K, t) == doctest::Approx(oracle::j_K_series(K, t)).epsilon(1e-8));
  }
  CHECK(j_K(0.0, 2.0) == 0.25);
  CHECK(j_K(1.0, 0.5) == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-15));
}

TEST_CASE("primitives") {
  CHECK(ControlModel::power(1.0, 0.5).primitive(1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ControlModel::power(1.0, 0.5).primitive(0.0) == 0.0);
  CHECK(m_tilde(PowerControl{3.0, 0.25}) == doctest::Approx(4.0));
  CHECK(ControlModel::reference_rcd(0.0, 1.0).primitive(2.0) == doctest::Approx(2.0).epsilon(1e-10));

  // Power-log primitive against a midpoint rule in log time.
  const auto pl = ControlModel::power_log(1.5, 2.0, 0.4);
  for (double t : {0.01, 0.3, 1.0}) {
    const int n = 400000;
    const double lo = std::log(t) - 60.0, hi = std::log(t);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = std::exp(lo + (hi - lo) * (i + 0.5) / n);
      acc += pl.eval(s) * s * (hi - lo) / n;
    }
    CHECK(pl.primitive(t) == doctest::Approx(acc).epsilon(1e-9));
  }
}

TEST_CASE("primitive is monotone and bounded by the power formula") {
  const auto p = ControlModel::power(0.8, 0.3);
  double last = 0.0;
  for (double t : log_grid(1e-4, 1.0, 50)) {
    const double C = p.primitive(t);
    CHECK(C > last);
    CHECK(C <= m_tilde(PowerControl{0.8, 0.3}) * std::pow(t, 0.7) * (1.0 + 1e-15));
    last = C;
  }
}

TEST_CASE("tabulated control from two-point c_star") {
  const int n = 1 << 20;
  std::vector<double> t(n), c(n);
  for (int i = 0; i < n; ++i) {
    t[static_cast<std::size_t>(i)] = static_cast<double>(i + 1) / n;
    c[static_cast<std::size_t>(i)] = oracle::p2_c_star(t[static_cast<std::size_t>(i)]);
  }
  const auto tab = ControlModel::tabulated(t, c);
  for (double s : {0.001, 0.1, 0.5, 1.0}) {
    CHECK(std::abs(tab.primitive(s) - oracle::p2_C_star(s)) <= 1e-6);
    CHECK(tab.primitive(s) >= oracle::p2_C_star(s));
    CHECK(tab.eval(s) >= oracle::p2_c_star(s));
  }
  CHECK(tab.eval(1e-9) == c.front());

  const auto envelope = ControlModel::tabulated({0.1, 0.2, 0.3}, {1.0, 2.0, 0.5});
  CHECK(envelope.eval(0.15) == 2.0);
  CHECK(envelope.eval(0.25) == 2.0);
  CHECK(envelope.eval(0.35) == 0.5);
  CHECK_THROWS_AS(ControlModel::tabulated({0.2, 0.1}, {1.0, 1.0}), Error);
}

TEST_CASE("power fit") {
  SUBCASE("constant samples") {
    std::vector<std::pair<double, double>> s;
    for (double t : log_grid()) s.push_back({t, 1.0});
    const auto c = fit_power_control(s);
    CHECK(c.as_power()->b == 0.05);
    CHECK(c.as_power()->M == 1.0);
  }
  SUBCASE("self-consistency") {
    std::vector<std::pair<double, double>> s;
    for (double t : log_grid()) s.push_back({t, 3.0 / std::sqrt(t)});
    const auto c = fit_power_control(s);
    CHECK(std::abs(c.as_power()->M - 3.0) <= 1e-12);
    CHECK(c.as_power()->b == 0.5);
  }
  SUBCASE("two-point samples are dominated exactly") {
    std::vector<std::pair<double, double>> s;
    for (double t : log_grid()) s.push_back({t, oracle::p2_c_star(t)});
    for (std::optional<double> b : {std::optional<double>{}, std::optional<double>{0.05}, std::optional<double>{0.5}}) {
      const auto c = fit_power_control(s, b);
      for (const auto& [t, v] : s) CHECK(v <= c.eval(t));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(fit_power_control({}), Error);
    CHECK_THROWS_AS(fit_power_control({{2.0, 1.0}}), Error);
    CHECK_THROWS_AS(fit_power_control({{0.5, 1.0}}, 1.5), Error);
  }
}

TEST_CASE("log threshold") {
  CHECK(log_threshold_T(0.0, 0.3) == 1.0);
  CHECK(std::abs(log_threshold_T(1.0, 1.0) - 1.0) <= 1e-12);
  for (double a : {1.0, 2.0, 3.0})
    for (double eps : {0.25, 0.5, 1.0}) {
      CAPTURE(a);
      CAPTURE(eps);
      const double T = log_threshold_T(a, eps);
      CHECK(T > 0.0);
      CHECK(T <= 1.0);
      if (a > eps) {
        CHECK(T == doctest::Approx(oracle::log_threshold(a, eps)).epsilon(1e-10));
        const double lhs = std::pow(1.0 - std::log(T), a), rhs = std::pow(T, -eps);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);
      }
      for (int i = 1; i <= 100; ++i) {
        const double t = std::min(T, T * i / 100.0);
        CHECK(std::pow(1.0 + std::abs(std::log(t)), a) <= std::pow(t, -eps) * (1.0 + 1e-12));
      }
    }
  CHECK_THROWS_AS(log_threshold_T(-1.0, 1.0), Error);
  CHECK_THROWS_AS(log_threshold_T(1.0, 0.0), Error);
}

TEST_CASE("power from power-log") {
  const auto p = power_from_log(PowerLogControl{2.0, 1.0, 0.5}, 0.25);
  CHECK(p.as_power()->b == 0.75);
  CHECK(p.horizon() == log_threshold_T(1.0, 0.25));
  const auto pl = ControlModel::power_log(2.0, 1.0, 0.5);
  for (int i = 1; i <= 50; ++i) {
    const double t = std::min(p.horizon(), p.horizon() * i / 50.0);
    CHECK(pl.eval(t) <= p.eval(t) * (1.0 + 1e-12));
  }
  CHECK_THROWS_AS(power_from_log(PowerLogControl{1.0, 1.0, 0.9}, 0.2), Error);
}

TEST_CASE("control json and files") {
  for (const auto& c : {ControlModel::power(2.0, 0.5), ControlModel::power_log(1.0, 2.0, 0.3),
                        ControlModel::tabulated({0.1, 1.0}, {3.0, 1.0}), ControlModel::reference_rcd(-0.5, 2.0),
                        ControlModel::power(1.0, 0.5, kUnboundedHorizon)}) {
    const auto back = ControlModel::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(back.horizon() == c.horizon());
  }
  CHECK_THROWS_AS(ControlModel::from_json(nlohmann::json::parse(R"({"variant":"power","M":1})")), Error);
  CHECK_THROWS_AS(ControlModel::from_json(nlohmann::json::parse(R"({"variant":"cubic"})")), Error);
  CHECK_THROWS_AS(ControlModel::from_json(nlohmann::json::parse(R"({"variant":"power","M":1,"b":0.5,"x":2})")), Error);

  const std::string path = "test_controls_file.json";
  save_control_file(path, ControlModel::power(2.0, 0.25));
  CHECK(load_control_file(path).as_power()->M == 2.0);
  {
    std::ofstream out(path);
    out << "{\"variant\": \"power\", \"M\": ";
  }
  try {
    load_control_file(path);
    FAIL("corrupted file accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(path) != std::string::npos);
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_control_file("missing_control_file.json"), Error);
}

TEST_CASE("sample files") {
  const std::vector<std::pair<double, double>> s{{0.1, 2.5}, {1.0, 0.75}};
  const std::string path = "test_samples.csv";
  {
    std::ofstream out(path);
    out << "t,c_star\n# note\n" << format_samples(s);
  }
  CHECK(read_samples(path) == s);
  std::remove(path.c_str());
}
