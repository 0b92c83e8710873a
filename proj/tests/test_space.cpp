#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "semlab/generate.hpp"
#include "semlab/space.hpp"

using namespace semlab;

namespace {

bool has_axiom(const std::vector<Violation>& v, const std::string& axiom) {
  for (const auto& x : v)
    if (x.axiom == axiom) return true;
  return false;
}

}  // namespace

TEST_CASE("two-point space is valid and calibrated") {
  const auto g = generate_space("two_point");
  CHECK(validate_space(g.space).empty());
  CHECK(g.space.distance(0, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(calibration_ratio(g.space, g.dirichlet) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("triangle violation names the offending triple") {
  Matrix d(3, 3);
  d << 0, 1, 3, 1, 0, 1, 3, 1, 0;
  const auto v = validate_space(MetricMeasureSpace(d, Vector::Ones(3)));
  REQUIRE(has_axiom(v, "triangle"));
  for (const auto& x : v)
    if (x.axiom == "triangle") {
      std::vector<Index> w = x.witness;
      std::sort(w.begin(), w.end());
      CHECK(w == std::vector<Index>{0, 1, 2});
    }
}

TEST_CASE("zero mass is reported") {
  Matrix d(2, 2);
  d << 0, 1, 1, 0;
  Vector m(2);
  m << 1, 0;
  CHECK(has_axiom(validate_space(MetricMeasureSpace(d, m)), "positive_mass"));
}

TEST_CASE("other axiom violations") {
  Matrix d(2, 2);
  d << 0, 1, 2, 0;
  CHECK(has_axiom(validate_space(MetricMeasureSpace(d, Vector::Ones(2))), "symmetry"));
  d << 0, 0, 0, 0;
  CHECK(has_axiom(validate_space(MetricMeasureSpace(d, Vector::Ones(2))), "separation"));
  d << 1, 1, 1, 0;
  CHECK(has_axiom(validate_space(MetricMeasureSpace(d, Vector::Ones(2))), "zero_diagonal"));
  d << 0, NAN, NAN, 0;
  CHECK(has_axiom(validate_space(MetricMeasureSpace(d, Vector::Ones(2))), "finite"));
}

TEST_CASE("shape errors throw") {
  CHECK_THROWS_AS(MetricMeasureSpace(Matrix::Zero(1, 1), Vector::Ones(1)), Error);
  CHECK_THROWS_AS(MetricMeasureSpace(Matrix::Zero(3, 3), Vector::Ones(2)), Error);
}

TEST_CASE("generator families") {
  SUBCASE("cycle degrees") {
    const auto g = generate_space("cycle:n=4");
    for (Index x = 0; x < 4; ++x) CHECK(g.dirichlet.degrees()(x) == 2.0);
    CHECK(g.space.distance(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.space.distance(0, 2) == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("path distances add up") {
    const auto g = generate_space("path:n=3");
    CHECK(g.space.distance(0, 2) ==
          doctest::Approx(g.space.distance(0, 1) + g.space.distance(1, 2)).epsilon(1e-15));
  }
  SUBCASE("mass override rescales the calibrated metric") {
    const auto g = generate_space("two_point:mass=4");
    CHECK(g.space.distance(0, 1) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  }
  SUBCASE("uncalibrated request keeps edge lengths") {
    const auto g = generate_space("two_point:calibrate=0");
    CHECK(g.space.distance(0, 1) == 1.0);
  }
  SUBCASE("all families validate") {
    for (const char* spec : {"star:n=5", "complete:n=6", "grid:n1=3,n2=4", "grid:n1=3,n2=3,torus=1",
                             "random_geometric:n=12,seed=4", "random_weighted:n=9,seed=2"}) {
      CAPTURE(spec);
      const auto g = generate_space(spec);
      CHECK(validate_space(g.space).empty());
      CHECK(DirichletStructure::connected(g.dirichlet.conductances()));
      CHECK(calibration_ratio(g.space, g.dirichlet) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("bad specs") {
    CHECK_THROWS_AS(generate_space("moebius:n=3"), Error);
    CHECK_THROWS_AS(generate_space("path:n=1"), Error);
    CHECK_THROWS_AS(generate_space("two_point:weight=-1"), Error);
  }
}

TEST_CASE("family spec round trip") {
  const auto spec = FamilySpec::parse("random_geometric:n=20,radius=0.4,seed=3");
  CHECK(spec.family == "random_geometric");
  CHECK(spec.integer("n", 0) == 20);
  CHECK(spec.number("radius", 0) == 0.4);
  CHECK(FamilySpec::parse(spec.to_string()).params == spec.params);
}

TEST_CASE("calibrated gradient is bounded by the Lipschitz constant") {
  const auto g = generate_space("random_geometric:n=15,seed=11");
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 200; ++i) {
    Density f(15);
    for (Index x = 0; x < 15; ++x) f(x) = normal(rng);
    const double lip = lipschitz_constant(g.space, f);
    CHECK(carre_du_champ(g.dirichlet, f).cwiseSqrt().maxCoeff() <= lip * (1.0 + 1e-12));
    CHECK(metric_slope(g.space, f).maxCoeff() == doctest::Approx(lip).epsilon(1e-14));
  }
}

TEST_CASE("space json round trip") {
  const auto g = generate_space("random_weighted:n=7,seed=9");
  const auto back = space_from_json(space_to_json(g));
  CHECK(back.space.distances() == g.space.distances());
  CHECK(back.space.masses() == g.space.masses());
  CHECK(back.dirichlet.conductances() == g.dirichlet.conductances());

  const std::string path = "test_space_roundtrip.json";
  save_space_file(path, g);
  const auto loaded = resolve_space("file:" + path);
  CHECK(loaded.space.distances() == g.space.distances());
  std::remove(path.c_str());

  CHECK_THROWS_AS(space_from_json("{\"n\": 2, \"d\": [0, 1, 1]}"), Error);
  CHECK_THROWS_AS(space_from_json("not json"), Error);
}

TEST_CASE("shortest path metric") {
  Matrix len = Matrix::Zero(3, 3);
  len(0, 1) = len(1, 0) = 1.0;
  len(1, 2) = len(2, 1) = 2.0;
  const Matrix d = shortest_path_metric(len);
  CHECK(d(0, 2) == 3.0);
  CHECK(d(2, 0) == 3.0);
}

TEST_CASE("measures and subsets") {
  const auto g = generate_space("path:n=4,calibrate=0");
  const auto mu = AtomicMeasure({{0, 1.0}, {2, -0.5}, {0, 0.25}});
  CHECK(mu.weights(4)(0) == 1.25);
  CHECK(mu.total_mass() == 0.75);
  CHECK(mu.total_variation() == 1.75);
  CHECK_FALSE(mu.nonnegative());
  const auto a = SubsetIndicator::from_bitmask(4, 0b0101);
  CHECK(a.count() == 2);
  CHECK(a.complement().bitmask() == 0b1010);
  CHECK(a.measure(g.space) == 2.0);
  Density f(4);
  f << 1, -1, 0, 2;
  CHECK(SubsetIndicator::from_predicate(f, true).bitmask() == 0b1001);
  CHECK(SubsetIndicator::from_predicate(f, false).bitmask() == 0b0110);
  CHECK(positive_part(f) - negative_part(f) == f);
  CHECK(l1_norm(g.space, f) == 4.0);
  CHECK(linf_norm(f) == 2.0);
}
