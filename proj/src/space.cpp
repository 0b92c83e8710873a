#include "semlab/space.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semlab/generate.hpp"

namespace semlab {

MetricMeasureSpace::MetricMeasureSpace(Matrix d, Vector m) : d_(std::move(d)), m_(std::move(m)) {
  if (m_.size() < 2) throw Error("metric-measure space needs at least 2 points");
  if (d_.rows() != m_.size() || d_.cols() != m_.size())
    throw Error("distance matrix must be " + std::to_string(m_.size()) + "x" +
                std::to_string(m_.size()));
}

double integral(const MetricMeasureSpace& space, const Density& f) {
  return f.dot(space.masses());
}

double inner(const MetricMeasureSpace& space, const Density& f, const Density& g) {
  return (f.array() * g.array() * space.masses().array()).sum();
}

double l1_norm(const MetricMeasureSpace& space, const Density& f) {
  return f.cwiseAbs().dot(space.masses());
}

double l2_norm(const MetricMeasureSpace& space, const Density& f) {
  return std::sqrt(inner(space, f, f));
}

double linf_norm(const Density& f) { return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff(); }

Density positive_part(const Density& f) { return f.cwiseMax(0.0); }

Density negative_part(const Density& f) { return (-f).cwiseMax(0.0); }

double lipschitz_constant(const MetricMeasureSpace& space, const Density& f) {
  double lip = 0.0;
  const Index n = space.size();
  for (Index x = 0; x < n; ++x)
    for (Index y = x + 1; y < n; ++y)
      lip = std::max(lip, std::abs(f(x) - f(y)) / space.distance(x, y));
  return lip;
}

// ---- subsets ---------------------------------------------------------------

SubsetIndicator SubsetIndicator::from_bitmask(Index n, std::uint64_t bits) {
  SubsetIndicator s;
  s.mask.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) s.mask[static_cast<std::size_t>(i)] = (bits >> i) & 1U;
  return s;
}

SubsetIndicator SubsetIndicator::from_predicate(const Density& f, bool strictly_positive) {
  SubsetIndicator s;
  s.mask.resize(static_cast<std::size_t>(f.size()));
  for (Index i = 0; i < f.size(); ++i)
    s.mask[static_cast<std::size_t>(i)] = strictly_positive ? f(i) > 0.0 : f(i) <= 0.0;
  return s;
}

Index SubsetIndicator::count() const {
  return static_cast<Index>(std::count(mask.begin(), mask.end(), true));
}

double SubsetIndicator::measure(const MetricMeasureSpace& space) const {
  double total = 0.0;
  for (Index i = 0; i < size(); ++i)
    if (contains(i)) total += space.mass(i);
  return total;
}

SubsetIndicator SubsetIndicator::complement() const {
  SubsetIndicator s{mask};
  s.mask.flip();
  return s;
}

Density SubsetIndicator::indicator() const {
  Density chi(size());
  for (Index i = 0; i < size(); ++i) chi(i) = contains(i) ? 1.0 : 0.0;
  return chi;
}

std::uint64_t SubsetIndicator::bitmask() const {
  if (size() > 64) throw Error("subset too large for a 64-bit mask");
  std::uint64_t bits = 0;
  for (Index i = 0; i < size(); ++i)
    if (contains(i)) bits |= std::uint64_t{1} << i;
  return bits;
}

std::string SubsetIndicator::to_string() const {
  std::string out = "{";
  bool first = true;
  for (Index i = 0; i < size(); ++i) {
    if (!contains(i)) continue;
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

// ---- measures --------------------------------------------------------------

AtomicMeasure AtomicMeasure::dirac(Index x, double weight) {
  return AtomicMeasure({Atom{x, weight}});
}

AtomicMeasure AtomicMeasure::from_density(const MetricMeasureSpace& space, const Density& f) {
  if (f.size() != space.size()) throw Error("density has wrong length");
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(f.size()));
  for (Index x = 0; x < f.size(); ++x) atoms.push_back({x, f(x) * space.mass(x)});
  return AtomicMeasure(std::move(atoms));
}

AtomicMeasure AtomicMeasure::from_weights(const Vector& weights) {
  std::vector<Atom> atoms;
  for (Index x = 0; x < weights.size(); ++x) atoms.push_back({x, weights(x)});
  return AtomicMeasure(std::move(atoms));
}

Vector AtomicMeasure::weights(Index n) const {
  Vector out = Vector::Zero(n);
  for (const auto& a : atoms_) {
    if (a.point < 0 || a.point >= n) throw Error("atom outside the point set");
    out(a.point) += a.weight;
  }
  return out;
}

double AtomicMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

double AtomicMeasure::total_variation() const {
  // Atoms at the same point may cancel.
  Index n = 0;
  for (const auto& a : atoms_) n = std::max(n, a.point + 1);
  return weights(n).cwiseAbs().sum();
}

bool AtomicMeasure::nonnegative() const {
  return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.weight >= 0.0; });
}

// ---- validation ------------------------------------------------------------

std::vector<Violation> validate_space(const MetricMeasureSpace& space, double tol) {
  std::vector<Violation> out;
  const Matrix& d = space.distances();
  const Index n = space.size();
  for (Index x = 0; x < n; ++x) {
    const double mx = space.mass(x);
    if (!std::isfinite(mx) || mx <= 0.0)
      out.push_back({"positive_mass", {x}, "zero-mass point " + std::to_string(x)});
    if (d(x, x) != 0.0)
      out.push_back({"zero_diagonal", {x}, "d(x,x) != 0 at " + std::to_string(x)});
  }
  for (Index x = 0; x < n; ++x) {
    for (Index y = x + 1; y < n; ++y) {
      if (!std::isfinite(d(x, y)) || !std::isfinite(d(y, x)))
        out.push_back({"finite", {x, y}, "infinite distance"});
      if (std::abs(d(x, y) - d(y, x)) > tol * (1.0 + std::abs(d(x, y))))
        out.push_back({"symmetry", {x, y}, "d(x,y) != d(y,x)"});
      if (!(d(x, y) > 0.0)) out.push_back({"separation", {x, y}, "d(x,y) <= 0 for x != y"});
    }
  }
  for (Index x = 0; x < n; ++x)
    for (Index z = x + 1; z < n; ++z)
      for (Index y = 0; y < n; ++y) {
        if (y == x || y == z) continue;
        if (d(x, z) > d(x, y) + d(y, z) + tol * (1.0 + d(x, z)))
          out.push_back({"triangle", {x, y, z},
                         "triangle violation at (" + std::to_string(x) + "," + std::to_string(y) +
                             "," + std::to_string(z) + ")"});
      }
  const double total = space.total_mass();
  if (!std::isfinite(total) || total <= 0.0)
    out.push_back({"finite_total_mass", {}, "total mass not finite and positive"});
  return out;
}

// ---- family descriptors ----------------------------------------------------

FamilySpec FamilySpec::parse(const std::string& text) {
  FamilySpec spec;
  const auto colon = text.find(':');
  spec.family = text.substr(0, colon);
  if (spec.family.empty()) throw Error("empty family name in '" + text + "'");
  if (colon == std::string::npos) return spec;
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error("malformed family parameter '" + item + "' in '" + text + "'");
    spec.params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return spec;
}

std::string FamilySpec::to_string() const {
  std::string out = family;
  bool first = true;
  for (const auto& [k, v] : params) {
    out += first ? ":" : ",";
    out += k + "=" + v;
    first = false;
  }
  return out;
}

double FamilySpec::number(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error("parameter " + key + "=" + it->second + " is not a number");
  }
}

std::int64_t FamilySpec::integer(const std::string& key, std::int64_t fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t used = 0;
    const auto v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error("parameter " + key + "=" + it->second + " is not an integer");
  }
}

// ---- generators ------------------------------------------------------------

Matrix shortest_path_metric(const Matrix& edge_lengths) {
  const Index n = edge_lengths.rows();
  constexpr double inf = std::numeric_limits<double>::infinity();
  Matrix d = Matrix::Constant(n, n, inf);
  for (Index x = 0; x < n; ++x) {
    d(x, x) = 0.0;
    for (Index y = 0; y < n; ++y)
      if (x != y && edge_lengths(x, y) > 0.0) d(x, y) = edge_lengths(x, y);
  }
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

namespace {

struct Draft {
  Matrix w;        // conductances
  Matrix lengths;  // edge lengths, 0 where no edge
  Vector m;
};

Draft empty_draft(Index n) {
  return {Matrix::Zero(n, n), Matrix::Zero(n, n), Vector::Ones(n)};
}

void add_edge(Draft& g, Index x, Index y, double w = 1.0, double len = 1.0) {
  if (x == y) return;
  g.w(x, y) = g.w(y, x) = w;
  g.lengths(x, y) = g.lengths(y, x) = len;
}

Index require_size(const FamilySpec& spec, std::int64_t fallback, Index minimum) {
  const auto n = spec.integer("n", fallback);
  if (n < minimum)
    throw Error("family " + spec.family + " needs n >= " + std::to_string(minimum) + ", got " +
                std::to_string(n));
  return static_cast<Index>(n);
}

Draft random_geometric_draft(Index n, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::array<double, 2>> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) p = {unit(rng), unit(rng)};
  Draft g = empty_draft(n);
  for (Index x = 0; x < n; ++x)
    for (Index y = x + 1; y < n; ++y) {
      const auto& a = pts[static_cast<std::size_t>(x)];
      const auto& b = pts[static_cast<std::size_t>(y)];
      const double dist = std::hypot(a[0] - b[0], a[1] - b[1]);
      if (dist <= radius && dist > 0.0) add_edge(g, x, y, 1.0, dist);
    }
  return g;
}

Draft random_weighted_draft(Index n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  Draft g = empty_draft(n);
  for (Index x = 0; x < n; ++x)
    for (Index y = x + 1; y < n; ++y)
      if (unit(rng) < p) {
        const double w = scale(rng);
        add_edge(g, x, y, w, scale(rng));
      }
  for (Index x = 0; x < n; ++x) g.m(x) = scale(rng);
  return g;
}

Draft build_draft(const FamilySpec& spec) {
  const std::string& family = spec.family;
  if (family == "two_point") {
    Draft g = empty_draft(2);
    add_edge(g, 0, 1);
    return g;
  }
  if (family == "path") {
    const Index n = require_size(spec, 3, 2);
    Draft g = empty_draft(n);
    for (Index i = 0; i + 1 < n; ++i) add_edge(g, i, i + 1);
    return g;
  }
  if (family == "cycle") {
    const Index n = require_size(spec, 4, 3);
    Draft g = empty_draft(n);
    for (Index i = 0; i < n; ++i) add_edge(g, i, (i + 1) % n);
    return g;
  }
  if (family == "star") {
    const Index n = require_size(spec, 4, 2);
    Draft g = empty_draft(n);
    for (Index i = 1; i < n; ++i) add_edge(g, 0, i);
    return g;
  }
  if (family == "complete") {
    const Index n = require_size(spec, 4, 2);
    Draft g = empty_draft(n);
    for (Index x = 0; x < n; ++x)
      for (Index y = x + 1; y < n; ++y) add_edge(g, x, y);
    return g;
  }
  if (family == "grid") {
    const auto n1 = static_cast<Index>(spec.integer("n1", 3));
    const auto n2 = static_cast<Index>(spec.integer("n2", n1));
    const bool torus = spec.integer("torus", 0) != 0;
    if (n1 < 1 || n2 < 1 || n1 * n2 < 2) throw Error("grid needs at least 2 points");
    Draft g = empty_draft(n1 * n2);
    auto id = [n2](Index i, Index j) { return i * n2 + j; };
    for (Index i = 0; i < n1; ++i)
      for (Index j = 0; j < n2; ++j) {
        if (j + 1 < n2) add_edge(g, id(i, j), id(i, j + 1));
        else if (torus && n2 > 2) add_edge(g, id(i, j), id(i, 0));
        if (i + 1 < n1) add_edge(g, id(i, j), id(i + 1, j));
        else if (torus && n1 > 2) add_edge(g, id(i, j), id(0, j));
      }
    return g;
  }
  if (family == "random_geometric" || family == "random_weighted") {
    const Index n = require_size(spec, 10, 2);
    const auto seed = static_cast<std::uint64_t>(spec.integer("seed", 0));
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
      Draft g = family == "random_geometric"
                    ? random_geometric_draft(n, spec.number("radius", 0.5), seed + attempt)
                    : random_weighted_draft(n, spec.number("p", 0.4), seed + attempt);
      if (DirichletStructure::connected(g.w)) return g;
    }
    throw Error("no connected draw for " + spec.to_string() + " after 100 attempts");
  }
  throw Error("unknown space family '" + family + "'");
}

}  // namespace

GeneratedSpace generate_space(const FamilySpec& spec) {
  Draft g = build_draft(spec);
  g.w *= spec.number("weight", 1.0);
  g.m *= spec.number("mass", 1.0);
  if (!(g.w.maxCoeff() > 0.0) || !(g.m.minCoeff() > 0.0))
    throw Error("weight and mass overrides must be positive");
  MetricMeasureSpace raw(shortest_path_metric(g.lengths), g.m);
  DirichletStructure dirichlet(raw, g.w);
  if (spec.integer("calibrate", 1) == 0) return {std::move(raw), std::move(dirichlet)};
  return {calibrate_metric(raw, dirichlet), std::move(dirichlet)};
}

GeneratedSpace generate_space(const std::string& spec) { return generate_space(FamilySpec::parse(spec)); }

double calibration_ratio(const MetricMeasureSpace& space, const DirichletStructure& dirichlet) {
  if (space.size() != dirichlet.size()) throw Error("space and dirichlet structure differ in size");
  double q_max = 0.0;
  for (Index x = 0; x < space.size(); ++x) {
    double q = 0.0;
    for (Index y = 0; y < space.size(); ++y) {
      const double w = dirichlet.conductance(x, y);
      if (w > 0.0) {
        if (!(space.distance(x, y) > 0.0))
          throw Error("edge (" + std::to_string(x) + "," + std::to_string(y) + ") has zero length");
        q += w * space.distance(x, y) * space.distance(x, y);
      }
    }
    q_max = std::max(q_max, q / (2.0 * space.mass(x)));
  }
  return q_max;
}

MetricMeasureSpace calibrate_metric(const MetricMeasureSpace& space,
                                    const DirichletStructure& dirichlet) {
  if (!DirichletStructure::connected(dirichlet.conductances()))
    throw Error("calibration needs a connected dirichlet structure");
  const double q_max = calibration_ratio(space, dirichlet);
  if (q_max == 1.0) return space;
  return MetricMeasureSpace(space.distances() / std::sqrt(q_max), space.masses());
}

// ---- files -----------------------------------------------------------------

namespace {

std::vector<double> row_major(const Matrix& a) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(a.size()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.push_back(a(i, j));
  return out;
}

Matrix square_from(const nlohmann::json& j, const char* key, Index n) {
  if (!j.contains(key) || !j.at(key).is_array()) throw Error(std::string("missing array '") + key + "'");
  const auto values = j.at(key).get<std::vector<double>>();
  if (static_cast<Index>(values.size()) != n * n)
    throw Error(std::string("array '") + key + "' must have n*n entries");
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) a(i, k) = values[static_cast<std::size_t>(i * n + k)];
  return a;
}

}  // namespace

std::string space_to_json(const GeneratedSpace& generated) {
  const auto& m = generated.space.masses();
  nlohmann::json j;
  j["n"] = generated.space.size();
  j["d"] = row_major(generated.space.distances());
  j["m"] = std::vector<double>(m.data(), m.data() + m.size());
  j["w"] = row_major(generated.dirichlet.conductances());
  return j.dump(1);
}

GeneratedSpace space_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("space file is not valid JSON: ") + e.what());
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "n" && key != "d" && key != "m" && key != "w")
      throw Error("unknown key '" + key + "' in space file");
  }
  for (const char* key : {"n", "d", "m", "w"})
    if (!j.contains(key)) throw Error(std::string("missing key '") + key + "' in space file");
  try {
    const auto n = j.at("n").get<Index>();
    if (n < 2) throw Error("space file needs n >= 2");
    const auto masses = j.at("m").get<std::vector<double>>();
    if (static_cast<Index>(masses.size()) != n) throw Error("array 'm' must have n entries");
    Vector m = Eigen::Map<const Vector>(masses.data(), n);
    MetricMeasureSpace space(square_from(j, "d", n), m);
    DirichletStructure dirichlet(space, square_from(j, "w", n));
    return {std::move(space), std::move(dirichlet)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed space file: ") + e.what());
  }
}

GeneratedSpace load_space_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open space file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return space_from_json(buf.str());
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void save_space_file(const std::string& path, const GeneratedSpace& generated) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write space file " + path);
  out << space_to_json(generated) << "\n";
}

GeneratedSpace resolve_space(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0) return load_space_file(spec.substr(5));
  if (spec.find(':') == std::string::npos && spec.find('.') != std::string::npos &&
      std::filesystem::exists(spec))
    return load_space_file(spec);
  return generate_space(spec);
}

}  // namespace semlab
