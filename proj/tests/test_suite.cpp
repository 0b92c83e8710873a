#include <doctest.h>

#include <set>

#include "semlab/generate.hpp"
#include "semlab/suite.hpp"

using namespace semlab;

namespace {

const InequalityReport* find(const SuiteResult& r, const std::string& name) {
  for (const auto& x : r.reports)
    if (x.name == name) return &x;
  return nullptr;
}

std::string dump(const SuiteResult& r) { return reports_to_json(r.reports); }

}  // namespace

TEST_CASE("group names") {
  CHECK(suite_groups().size() == 12);
  CHECK(parse_groups("all") == suite_groups());
  CHECK(parse_groups("eigen,buser") == std::vector<std::string>{"eigen", "buser"});
  CHECK_THROWS_AS(parse_groups("eigen,nope"), Error);
}

TEST_CASE("two-point suite passes with the expected equalities") {
  const auto g = generate_space("two_point");
  const HeatOperator heat(g.space, g.dirichlet);
  SuiteOptions options;
  options.seed = 7;
  const auto result = run_suite(heat, options);
  CHECK(result.all_passed());
  CHECK(result.h1.exact);
  for (const char* name : {"w1_smoothing", "caloric_poincare", "buser_implicit", "eigen_w1_implicit"}) {
    CAPTURE(name);
    const auto* r = find(result, name);
    REQUIRE(r != nullptr);
    CHECK(r->params.at("equalities") > 0.0);
  }
  std::set<std::string> names;
  for (const auto& r : result.reports) {
    CAPTURE(r.name);
    CHECK(r.ok());
    CHECK(names.insert(r.name).second);
  }
  CHECK(std::is_sorted(result.reports.begin(), result.reports.end(),
                       [](const auto& a, const auto& b) { return a.name < b.name; }));
}

TEST_CASE("suite is deterministic and thread-count independent") {
  const auto g = generate_space("random_geometric:n=9,seed=4");
  const HeatOperator heat(g.space, g.dirichlet);
  SuiteOptions options;
  options.seed = 3;
  options.samples = 20;
  options.threads = 1;
  const auto a = run_suite(heat, options);
  options.threads = 4;
  const auto b = run_suite(heat, options);
  CHECK(dump(a) == dump(b));
  CHECK(a.all_passed());
  options.seed = 4;
  CHECK(dump(run_suite(heat, options)) != dump(a));
}

TEST_CASE("group selection") {
  const auto g = generate_space("cycle:n=10");
  const HeatOperator heat(g.space, g.dirichlet);
  SuiteOptions options;
  options.seed = 1;
  options.samples = 10;
  options.groups = {"buser"};
  const auto result = run_suite(heat, options);
  CHECK(result.all_passed());
  for (const auto& r : result.reports) CHECK(r.name.rfind("buser", 0) == 0);
}

TEST_CASE("an invalid control produces failures with a reproduction descriptor") {
  const auto g = generate_space("cycle:n=6");
  const HeatOperator heat(g.space, g.dirichlet);
  SuiteOptions options;
  options.seed = 2;
  options.samples = 10;
  options.groups = {"structure"};
  options.space_label = "cycle:n=6";
  const auto ok = run_suite(heat, options);
  CHECK(ok.all_passed());
  REQUIRE(find(ok, "structure_fit_envelope") != nullptr);
  CHECK(find(ok, "structure_fit_envelope")->status == ReportStatus::Passed);

  options.groups = {"model"};
  options.control = ControlModel::power(1e-4, 0.5);
  const auto weak = run_suite(heat, options);
  CHECK(weak.all_passed());
  bool any_consistency = false;
  for (const auto& r : weak.reports) any_consistency |= r.status == ReportStatus::Consistency;
  CHECK(any_consistency);
}

TEST_CASE("failures carry a reproduction descriptor") {
  const auto g = generate_space("cycle:n=6");
  const HeatOperator heat(g.space, g.dirichlet);
  SuiteOptions options;
  options.seed = 2;
  options.samples = 5;
  options.groups = {"structure"};
  options.space_label = "cycle:n=6";
  options.control = ControlModel::power(1e-4, 0.5);
  const auto result = run_suite(heat, options);
  const auto* env = find(result, "structure_fit_envelope");
  REQUIRE(env != nullptr);
  CHECK(env->status == ReportStatus::Failed);
  CHECK_FALSE(result.all_passed());
  REQUIRE(env->notes.count("repro") == 1);
  CHECK(env->notes.at("repro").find("space=cycle:n=6") != std::string::npos);
  CHECK(env->notes.at("repro").find("seed=2") != std::string::npos);
}

TEST_CASE("larger spaces fall back to the sweep cut") {
  const auto g = generate_space("cycle:n=24");
  const HeatOperator heat(g.space, g.dirichlet);
  SuiteOptions options;
  options.samples = 5;
  options.groups = {"buser"};
  const auto result = run_suite(heat, options);
  CHECK_FALSE(result.h1.exact);
  CHECK(result.all_passed());
}
