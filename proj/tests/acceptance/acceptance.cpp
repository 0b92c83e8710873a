// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "semlab/generate.hpp"
#include "semlab/inequalities.hpp"
#include "semlab/scenario.hpp"
#include "semlab/spectral.hpp"
#include "semlab/suite.hpp"
#include "semlab/transport.hpp"

using namespace semlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects the first few problems of a criterion.
struct Tally {
  int checks = 0;
  int failures = 0;
  std::vector<std::string> first;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failures;
    if (first.size() < 5) first.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(17);
    s << what << ": got " << got << ", want " << want;
    expect(std::abs(got - want) <= tol, s.str());
  }
};

int g_failed = 0;

void verdict(int number, const std::string& title, const Tally& tally, const std::string& extra = "") {
  const bool ok = tally.failures == 0;
  if (!ok) ++g_failed;
  std::printf("%s criterion %d: %s (%d checks, %d failures%s%s)\n", ok ? "PASS" : "FAIL", number, title.c_str(),
              tally.checks, tally.failures, extra.empty() ? "" : "; ", extra.c_str());
  for (const auto& f : tally.first) std::printf("    %s\n", f.c_str());
  std::fflush(stdout);
}

struct Tested {
  std::string spec;
  std::unique_ptr<HeatOperator> heat;
  std::unique_ptr<SmoothingProfile> profile;
  std::unique_ptr<SuiteResult> suite;
};

std::string random_spec(int seed) {
  const int n = 3 + (7 * seed) % 20;
  const char* family = seed % 2 == 0 ? "random_geometric" : "random_weighted";
  return std::string(family) + ":n=" + std::to_string(n) + ",seed=" + std::to_string(seed);
}

Density vec2(double a, double b) {
  Density f(2);
  f << a, b;
  return f;
}

// ---- criterion 1 -----------------------------------------------------------

void two_point_exactness() {
  Tally tally;
  const auto start = Clock::now();
  const auto g = generate_space("two_point");
  const HeatOperator heat(g.space, g.dirichlet);
  const SmoothingProfile profile(heat, log_grid(1e-3, 1.0, 40));
  const SmoothingBound bound(profile);
  const auto h1 = h1_exact(g.space, g.dirichlet);

  tally.near(heat.eigenvalues()(1), 2.0, 1e-10, "lambda_1");
  tally.near(h1.value, std::sqrt(2.0), 1e-10, "h_1");
  for (std::size_t i = 0; i < profile.grid().size(); ++i) {
    const double t = profile.grid()[i];
    tally.near(profile.c_star_values()[i], oracle::p2_c_star(t), 1e-10, "c_star");
    tally.near(profile.theta_values()[i], oracle::p2_theta(t), 1e-10, "theta");
    tally.near(profile.primitive_values()[i], oracle::p2_C_star(t), 1e-10, "C_star");
    const auto w = check_w1_smoothing(bound, t, vec2(1, 0), vec2(0, 1));
    tally.expect(w.equality, "w1_smoothing equality");
    const auto cp = check_caloric_poincare(bound, t, vec2(1, 0));
    tally.expect(cp.equality, "caloric_poincare equality");
    for (const auto& r : check_eigen_implicit(bound, 1, t))
      if (r.name == "eigen_w1_implicit") tally.expect(r.equality, "eigen W1 equality");
  }
  tally.expect(check_buser_implicit(bound, h1).equality, "implicit Buser equality");
  const double elapsed = seconds_since(start);
  tally.expect(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
  verdict(1, "two-point closed forms and equalities", tally, "runtime " + std::to_string(elapsed) + " s");
}

// ---- criterion 2 -----------------------------------------------------------

std::vector<Tested> soundness_sweep() {
  Tally tally;
  std::vector<Tested> tested;
  const auto start = Clock::now();
  int reports = 0, consistency = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Tested t;
    t.spec = random_spec(seed);
    const auto g = generate_space(t.spec);
    t.heat = std::make_unique<HeatOperator>(g.space, g.dirichlet);
    t.profile = std::make_unique<SmoothingProfile>(*t.heat, log_grid());
    SuiteOptions options;
    options.seed = static_cast<std::uint64_t>(seed);
    options.space_label = t.spec;
    t.suite = std::make_unique<SuiteResult>(run_suite(*t.heat, options));
    tally.expect(t.suite->h1.exact, t.spec + ": h1 not exact");
    for (const auto& r : t.suite->reports) {
      ++reports;
      if (r.status == ReportStatus::Consistency) ++consistency;
      const std::string where = t.spec + " " + r.name + " (" + to_string(r.status) + ")";
      tally.expect(r.status != ReportStatus::Failed && r.status != ReportStatus::Skipped, where);
      if (r.status == ReportStatus::Passed) tally.expect(r.slack >= -kSlackTolerance * r.scale(), where);
    }
    tested.push_back(std::move(t));
  }
  const double elapsed = seconds_since(start);
  tally.expect(elapsed < 300.0, "runtime " + std::to_string(elapsed) + " s");
  verdict(2, "soundness sweep over 100 random spaces", tally,
          std::to_string(reports) + " aggregated reports, " + std::to_string(consistency) +
              " consistency, runtime " + std::to_string(elapsed) + " s");
  return tested;
}

// ---- criterion 3 -----------------------------------------------------------

void structural_identities() {
  Tally tally;
  std::mt19937_64 rng(2718);
  std::normal_distribution<double> normal;
  for (const char* spec : {"two_point", "path:n=6", "cycle:n=9", "grid:n1=3,n2=4", "star:n=7",
                           "random_geometric:n=14,seed=1", "random_weighted:n=11,seed=6",
                           "random_weighted:n=20,seed=13"}) {
    const auto g = generate_space(spec);
    const HeatOperator heat(g.space, g.dirichlet);
    const Index n = g.space.size();
    const auto& m = g.space.masses();
    auto draw = [&] {
      Density f(n);
      for (Index x = 0; x < n; ++x) f(x) = normal(rng);
      return f;
    };
    const std::string s = spec;
    for (int trial = 0; trial < 20; ++trial) {
      const Density f = draw(), h = draw();
      const double t = std::exp(-6.0 + 0.4 * trial), u = 0.37 * (trial + 1);
      const double scale = 1.0 + f.squaredNorm() + h.squaredNorm();
      // Cheeger energy is a quadratic form
      const double para = cheeger_energy(g.dirichlet, f + h) + cheeger_energy(g.dirichlet, f - h) -
                          2.0 * cheeger_energy(g.dirichlet, f) - 2.0 * cheeger_energy(g.dirichlet, h);
      tally.expect(std::abs(para) <= 1e-10 * scale, s + ": parallelogram");
      // integration by parts against the carre du champ
      const Density lap = laplacian_apply(g.dirichlet, f);
      double grad = 0.0;
      for (Index x = 0; x < n; ++x)
        for (Index y = 0; y < n; ++y)
          grad += 0.5 * g.dirichlet.conductance(x, y) * (f(y) - f(x)) * (h(y) - h(x));
      tally.expect(std::abs(-inner(g.space, h, lap) - grad) <= 1e-10 * scale, s + ": integration by parts");
      // semigroup law
      const Density a = heat.apply(t, heat.apply(u, f)), b = heat.apply(t + u, f);
      tally.expect((a - b).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + f.cwiseAbs().maxCoeff()), s + ": semigroup");
      // self-adjointness
      tally.expect(std::abs(inner(g.space, heat.apply(t, f), h) - inner(g.space, f, heat.apply(t, h))) <= 1e-10 * scale,
                   s + ": self-adjoint");
      // mass preservation
      tally.expect(std::abs(integral(g.space, heat.apply(t, f)) - integral(g.space, f)) <=
                       1e-10 * (1.0 + l1_norm(g.space, f)),
                   s + ": mass preservation");
      // maximum principle
      const Density ht = heat.apply(t, f);
      tally.expect(ht.maxCoeff() <= f.maxCoeff() + 1e-10 && ht.minCoeff() >= f.minCoeff() - 1e-10,
                   s + ": maximum principle");
      // kernel symmetry and H_t f = sum_y h_t[x](y) f(y) m(y)
      const Matrix k = heat.kernel(t);
      tally.expect((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + k.cwiseAbs().maxCoeff()),
                   s + ": kernel symmetry");
      tally.expect((k * f.cwiseProduct(m) - ht).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + f.cwiseAbs().maxCoeff()),
                   s + ": kernel representation");
      // L2 decay for mean-zero data
      const Density f0 = (f.array() - integral(g.space, f) / g.space.total_mass()).matrix();
      const double lambda1 = heat.eigenvalues()(1);
      tally.expect(l2_norm(g.space, heat.apply(t, f0)) <= std::exp(-lambda1 * t) * l2_norm(g.space, f0) * (1.0 + 1e-10) + 1e-14,
                   s + ": L2 decay");
      // a priori bound for the Laplacian of the heat flow
      tally.expect(l2_norm(g.space, laplacian_apply(g.dirichlet, ht)) <= l2_norm(g.space, f) / t * (1.0 + 1e-10),
                   s + ": a priori bound");
    }
    // heated eigenfunctions
    for (Index i = 0; i < n; ++i) {
      const Density phi = heat.eigenvectors().col(i);
      for (double t : {0.01, 0.5, 3.0}) {
        const Density lhs = heat.apply(t, phi);
        tally.expect((lhs - std::exp(-heat.eigenvalues()(i) * t) * phi).cwiseAbs().maxCoeff() <=
                         1e-10 * (1.0 + phi.cwiseAbs().maxCoeff()),
                     s + ": heated eigenfunction");
      }
    }
    // heat integration by parts
    for (int trial = 0; trial < 3; ++trial) {
      const Density f = draw(), h = draw();
      const auto r = check_heat_ibp(heat, 0.25 + 0.5 * trial, f, h);
      tally.expect(r.residual <= 1e-8, s + ": heat integration by parts residual " + std::to_string(r.residual));
    }
  }
  verdict(3, "structural identities", tally);
}

// ---- criterion 4 -----------------------------------------------------------

void c_star_oracle(const std::vector<Tested>& tested) {
  Tally tally;
  int spaces = 0;
  auto run = [&](const HeatOperator& heat, const std::string& label) {
    ++spaces;
    for (double t : {0.01, 0.1, 1.0})
      tally.near(heat.c_star(t), oracle::c_star_sign_vectors(heat, t), 1e-10, label + " t=" + std::to_string(t));
  };
  for (const auto& t : tested)
    if (t.heat->size() <= 12) run(*t.heat, t.spec);
  for (const char* spec : {"two_point", "path:n=8", "cycle:n=12", "star:n=9", "complete:n=7", "grid:n1=3,n2=4"}) {
    const auto g = generate_space(spec);
    run(HeatOperator(g.space, g.dirichlet), spec);
  }
  verdict(4, "c_star equals the sign-vector brute force", tally, std::to_string(spaces) + " spaces");
}

// ---- criterion 5 -----------------------------------------------------------

void transport_duality() {
  Tally tally;
  std::mt19937_64 rng(31415);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + (i * 13) % 39;
    const std::string spec = (i % 2 ? "random_weighted:n=" : "random_geometric:n=") + std::to_string(n) +
                             ",seed=" + std::to_string(1000 + i);
    const auto g = generate_space(spec);
    Vector a(n), b(n);
    for (Index x = 0; x < n; ++x) {
      a(x) = unit(rng) < 0.4 ? 0.0 : unit(rng);
      b(x) = unit(rng) < 0.4 ? 0.0 : unit(rng);
    }
    a(0) += 0.1;
    b(n - 1) += 0.1;
    const double total = 0.5 + 3.0 * unit(rng);
    a *= total / a.sum();
    b *= total / b.sum();
    const auto mu = AtomicMeasure::from_weights(a), nu = AtomicMeasure::from_weights(b);
    const auto w = w1(g.space, mu, nu);
    const auto bl = bl_star(g.space, mu, nu);
    const double gap = w.duality_gap / std::max(std::abs(w.primal_value), 1e-300);
    const double bl_gap = bl.duality_gap / std::max(std::abs(bl.primal_value), 1e-300);
    worst = std::max({worst, gap, bl_gap});
    tally.expect(gap <= 1e-7, spec + ": W1 primal/dual gap " + std::to_string(gap));
    tally.expect(bl_gap <= 1e-7, spec + ": BL* primal/dual gap " + std::to_string(bl_gap));
    tally.expect(bl.value <= w.value * (1.0 + 1e-12), spec + ": BL* <= W1");
    tally.expect(bl.value <= (a - b).cwiseAbs().sum() * (1.0 + 1e-12), spec + ": BL* <= total variation");
  }
  char extra[64];
  std::snprintf(extra, sizeof extra, "worst relative gap %.3g", worst);
  verdict(5, "transport duality", tally, extra);
}

// ---- criterion 6 -----------------------------------------------------------

void c_star_properties(const std::vector<Tested>& tested) {
  Tally tally;
  for (const auto& t : tested) {
    const auto& grid = t.profile->grid();
    const auto& c = t.profile->c_star_values();
    double min_d = std::numeric_limits<double>::infinity();
    const Matrix& d = t.heat->space().distances();
    for (Index x = 0; x < d.rows(); ++x)
      for (Index y = 0; y < d.cols(); ++y)
        if (x != y) min_d = std::min(min_d, d(x, y));
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (i > 0) tally.expect(c[i] <= c[i - 1], t.spec + ": c_star increases at t=" + std::to_string(grid[i]));
      tally.expect(grid[i] * c[i] <= 2.0 * grid[i] / min_d * (1.0 + 1e-12), t.spec + ": t c_star above 2t/min d");
      if (grid[i] * c[i] > grid[argmax] * c[argmax]) argmax = i;
    }
    tally.expect(argmax > 0, t.spec + ": t c_star maximal at the smallest grid time");
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i < grid.size(); ++i) samples.push_back({grid[i], c[i]});
    for (std::optional<double> b : {std::optional<double>{}, std::optional<double>{0.5}}) {
      const auto control = fit_power_control(samples, b);
      for (const auto& [s, v] : samples) tally.expect(v <= control.eval(s), t.spec + ": fit below a sample");
    }
  }
  verdict(6, "c_star monotone, t c_star bounded, fits dominate", tally);
}

// ---- criterion 7 -----------------------------------------------------------

void explicit_constants(const std::vector<Tested>& tested) {
  Tally tally;
  const std::vector<std::string> names{"buser_explicit", "eigen_nodal_explicit", "eigen_stein_explicit",
                                       "indeterminacy_explicit", "transport_sobolev_explicit"};
  for (const auto& t : tested)
    for (const auto& name : names) {
      const InequalityReport* found = nullptr;
      for (const auto& r : t.suite->reports)
        if (r.name == name) found = &r;
      tally.expect(found != nullptr, t.spec + ": " + name + " missing");
      if (found) tally.expect(found->pass && found->status == ReportStatus::Passed, t.spec + ": " + name);
    }

  const auto g = generate_space("two_point");
  const HeatOperator heat(g.space, g.dirichlet);
  const SmoothingProfile profile(heat, log_grid());
  std::vector<std::pair<double, double>> samples;
  for (std::size_t i = 0; i < profile.grid().size(); ++i)
    samples.push_back({profile.grid()[i], profile.c_star_values()[i]});
  const auto control = fit_power_control(samples, 0.5);
  const auto h1 = h1_exact(g.space, g.dirichlet);
  const auto r = check_buser_explicit(profile, control, h1);
  const double Mt = m_tilde(*control.as_power());
  const double branch = (1.0 - std::exp(-1.0)) / Mt * std::sqrt(2.0);
  tally.expect(r.pass, "two-point buser_explicit");
  tally.expect(r.params.at("branch_large_lambda") == 1.0, "two-point large-eigenvalue branch");
  tally.near(r.params.at("branch_bound"), branch, 1e-12, "two-point branch bound");
  tally.near(r.params.at("branch_implicit"), branch, 1e-12, "two-point branch from the implicit bound");
  tally.expect(h1.value >= branch, "two-point h1 above the branch bound");
  char extra[96];
  std::snprintf(extra, sizeof extra, "two-point branch bound %.6f <= h1 %.6f", branch, h1.value);
  verdict(7, "explicit constants with the fitted control", tally, extra);
}

// ---- criterion 8 -----------------------------------------------------------

void threshold_solver() {
  Tally tally;
  for (double eps : {0.1, 0.25, 1.0, 7.0}) tally.expect(log_threshold_T(0.0, eps) == 1.0, "a = 0");
  tally.near(log_threshold_T(1.0, 1.0), 1.0, 1e-12, "a = 1, eps = 1");
  for (double a : {1.0, 2.0, 3.0})
    for (double eps : {0.25, 0.5, 1.0}) {
      const double T = log_threshold_T(a, eps);
      const std::string label = "a=" + std::to_string(a) + " eps=" + std::to_string(eps);
      tally.expect(T > 0.0 && T <= 1.0, label + ": T outside (0, 1]");
      const double lhs = std::pow(1.0 - std::log(T), a), rhs = std::pow(T, -eps);
      tally.expect(std::abs(lhs - rhs) <= 1e-10, label + ": absolute residual");
      tally.expect(std::abs(lhs - rhs) <= 1e-10 * rhs, label + ": relative residual");
      if (a > eps) tally.near(T, oracle::log_threshold(a, eps), 1e-10 * T, label + ": fixed-point oracle");
      for (int i = 1; i <= 100; ++i) {
        const double t = std::min(T, T * i / 100.0);
        tally.expect(std::pow(1.0 + std::abs(std::log(t)), a) <= std::pow(t, -eps), label + ": downstream bound");
      }
    }
  verdict(8, "log threshold solver", tally);
}

// ---- criterion 9 -----------------------------------------------------------

void determinism() {
  Tally tally;
  const auto root = std::filesystem::temp_directory_path() / "semlab_acceptance_determinism";
  std::filesystem::remove_all(root);
  int files = 0;
  for (const char* text : {"space=two_point seed=7", "space=random_geometric:n=12,seed=5 seed=3 samples=40",
                           "space=cycle:n=10 seed=1 samples=30 control=power:M=2,b=0.5"}) {
    auto config = parse_config(text);
    config.out = (root / std::to_string(files)).string();
    std::vector<std::string> before;
    setenv("SEMLAB_THREADS", "8", 1);
    const auto first = run_scenario(config);
    for (const auto& f : first.files) before.push_back(read_text_file(f));
    setenv("SEMLAB_THREADS", "1", 1);
    const auto second = run_scenario(config);
    tally.expect(second.files == first.files, std::string(text) + ": file list differs");
    for (std::size_t i = 0; i < first.files.size() && i < second.files.size(); ++i) {
      ++files;
      tally.expect(read_text_file(second.files[i]) == before[i], std::string(text) + ": " + first.files[i]);
    }
  }
  unsetenv("SEMLAB_THREADS");
  std::filesystem::remove_all(root);
  verdict(9, "byte-identical scenario reruns", tally, std::to_string(files) + " files compared");
}

}  // namespace

int main() {
  try {
    two_point_exactness();
    const auto tested = soundness_sweep();
    structural_identities();
    c_star_oracle(tested);
    transport_duality();
    c_star_properties(tested);
    explicit_constants(tested);
    threshold_solver();
    determinism();
  } catch (const std::exception& e) {
    std::printf("FAIL: aborted with %s\n", e.what());
    return 2;
  }
  return g_failed == 0 ? 0 : 1;
}
