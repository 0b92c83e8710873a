#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "oracles.hpp"
#include "semlab/scenario.hpp"

using namespace semlab;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("semlab_test_scenario_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("minimal config takes the defaults") {
  const auto c = parse_config("space=two_point");
  CHECK(c.space == "two_point");
  CHECK(c.t_grid == "log:0.001,1,40");
  CHECK(c.seed == 0);
  CHECK(c.suite == "all");
  CHECK(c.samples == 100);
  CHECK(c.control == "fit");
  CHECK_FALSE(c.fit_b.has_value());
  CHECK(c.out == "semlab-out");
}

TEST_CASE("config errors name the offending key and position") {
  const std::string typo = message_of("spce=typo");
  CHECK(typo.find("spce") != std::string::npos);
  CHECK(typo.find("line 1") != std::string::npos);
  CHECK(message_of("space=a\nseed=1 seed=2").find("line 2") != std::string::npos);
  CHECK(message_of("seed=1").find("space") != std::string::npos);
  CHECK(message_of("space=two_point samples=-3").find("samples") != std::string::npos);
  CHECK(message_of("space=two_point suite=eigen,nope").find("nope") != std::string::npos);
  CHECK(message_of("space=two_point t_grid=lin:0,1,3").find("t_grid") != std::string::npos);
  CHECK(message_of("space=two_point fit_b=1.5").find("fit_b") != std::string::npos);
  CHECK(message_of("space=two_point control=power:M=1") != "");
  CHECK(message_of("space= two_point") != "");
}

TEST_CASE("config comments and canonical form") {
  const auto c = parse_config("# scenario\nspace=cycle:n=6   seed=42 # trailing\n  samples=7\nfit_b=0.5\n");
  CHECK(c.space == "cycle:n=6");
  CHECK(c.seed == 42);
  CHECK(c.samples == 7);
  CHECK(*c.fit_b == 0.5);
  const std::string canonical = serialize_config(c);
  CHECK(serialize_config(parse_config(canonical)) == canonical);
  CHECK(canonical.find("suite=all") != std::string::npos);
}

TEST_CASE("time grids and control specs") {
  const auto grid = parse_t_grid("log:0.01,2,5");
  REQUIRE(grid.size() == 5);
  CHECK(grid.front() == 0.01);
  CHECK(grid.back() == 2.0);
  CHECK_THROWS_AS(parse_t_grid("log:1,0.1,5"), Error);
  CHECK_FALSE(parse_control_spec("fit").has_value());
  CHECK(parse_control_spec("power:M=2,b=0.5")->eval(0.25) == doctest::Approx(4.0));
  CHECK(parse_control_spec("power:M=2,b=0.5,horizon=0.5")->horizon() == 0.5);
  CHECK(parse_control_spec("reference:K=0")->eval(1.0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(parse_control_spec("power_log:M=1,a=1,b=0.5")->kind() == "power_log");
  CHECK_THROWS_AS(parse_control_spec("cubic:M=1"), Error);
}

TEST_CASE("two-point sweep table matches the closed forms") {
  const auto g = resolve_space("two_point");
  const HeatOperator heat(g.space, g.dirichlet);
  const SmoothingProfile profile(heat, parse_t_grid("log:0.001,1,40"));
  std::istringstream in(sweep_table(profile));
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,c_star,C_star,theta");
  int rows = 0;
  while (std::getline(in, line)) {
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream fields(line);
    double t, c, C, theta;
    REQUIRE(static_cast<bool>(fields >> t >> c >> C >> theta));
    CHECK(std::abs(c - oracle::p2_c_star(t)) <= 1e-10);
    CHECK(std::abs(C - oracle::p2_C_star(t)) <= 1e-10);
    CHECK(std::abs(theta - oracle::p2_theta(t)) <= 1e-10);
    ++rows;
  }
  CHECK(rows == 40);
}

TEST_CASE("scenario run writes every file and reruns are byte-identical") {
  auto config = parse_config("space=two_point seed=7 samples=20");
  config.out = scratch("rerun");
  const auto first = run_scenario(config);
  CHECK(first.exit_code == 0);
  REQUIRE(first.files.size() == 6);
  std::vector<std::string> before;
  for (const auto& f : first.files) before.push_back(read_text_file(f));
  const auto second = run_scenario(config);
  REQUIRE(second.files == first.files);
  for (std::size_t i = 0; i < before.size(); ++i) {
    CAPTURE(first.files[i]);
    CHECK(read_text_file(second.files[i]) == before[i]);
  }
  CHECK(parse_config(before[0]).seed == 7);
  std::filesystem::remove_all(config.out);
}

TEST_CASE("corrupted control file is reported by name") {
  const std::string dir = scratch("corrupt");
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/control.json";
  write_text_file(path, "{\"variant\": \"power\", \"M\": ");
  auto config = parse_config("space=two_point samples=5");
  config.control = "file:" + path;
  config.out = dir + "/out";
  try {
    run_scenario(config);
    FAIL("corrupted control accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(path) != std::string::npos);
  }
  CHECK_FALSE(std::filesystem::exists(config.out));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a failing scenario exits nonzero") {
  auto config = parse_config("space=cycle:n=6 suite=structure samples=5 control=power:M=0.0001,b=0.5");
  config.out = scratch("failing");
  const auto outcome = run_scenario(config);
  CHECK(outcome.exit_code == 1);
  CHECK(read_text_file(config.out + "/report.csv").find(",failed") != std::string::npos);
  std::filesystem::remove_all(config.out);
}
