#include "semlab/dirichlet.hpp"

#include <cmath>
#include <queue>

namespace semlab {

DirichletStructure::DirichletStructure(Matrix w, Vector m) : w_(std::move(w)), m_(std::move(m)) {
  const Index n = m_.size();
  if (n < 2) throw Error("dirichlet structure needs at least 2 points");
  if (w_.rows() != n || w_.cols() != n) throw Error("conductance matrix has wrong shape");
  for (Index x = 0; x < n; ++x) {
    if (!(m_(x) > 0.0)) throw Error("point " + std::to_string(x) + " has non-positive mass");
    if (w_(x, x) != 0.0) throw Error("conductance diagonal must be zero");
    for (Index y = x + 1; y < n; ++y) {
      if (w_(x, y) != w_(y, x))
        throw Error("conductances not symmetric at (" + std::to_string(x) + "," +
                    std::to_string(y) + ")");
      if (!(w_(x, y) >= 0.0) || !std::isfinite(w_(x, y)))
        throw Error("conductances must be finite and non-negative");
      if (w_(x, y) > 0.0) edges_.emplace_back(x, y);
    }
  }
  if (!connected(w_)) throw Error("dirichlet structure is disconnected");
  degree_ = w_.rowwise().sum();
}

bool DirichletStructure::connected(const Matrix& w) {
  const Index n = w.rows();
  if (n == 0) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::queue<Index> todo;
  todo.push(0);
  seen[0] = true;
  Index reached = 1;
  while (!todo.empty()) {
    const Index x = todo.front();
    todo.pop();
    for (Index y = 0; y < n; ++y) {
      if (w(x, y) > 0.0 && !seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = true;
        ++reached;
        todo.push(y);
      }
    }
  }
  return reached == n;
}

Matrix DirichletStructure::graph_laplacian() const {
  Matrix lap = w_;
  lap.diagonal() -= degree_;
  return lap;
}

namespace {

void require_shape(const DirichletStructure& dirichlet, const Density& f) {
  if (f.size() != dirichlet.size()) throw Error("function length does not match the space");
}

}  // namespace

Density carre_du_champ(const DirichletStructure& dirichlet, const Density& f) {
  require_shape(dirichlet, f);
  Density gamma = Density::Zero(f.size());
  for (const auto& [x, y] : dirichlet.edges()) {
    const double diff = f(y) - f(x);
    const double e = dirichlet.conductance(x, y) * diff * diff;
    gamma(x) += e;
    gamma(y) += e;
  }
  return gamma.cwiseQuotient(2.0 * dirichlet.masses());
}

Density laplacian_apply(const DirichletStructure& dirichlet, const Density& f) {
  require_shape(dirichlet, f);
  return (dirichlet.graph_laplacian() * f).cwiseQuotient(dirichlet.masses());
}

double energy_form(const DirichletStructure& dirichlet, const Density& f, const Density& g) {
  require_shape(dirichlet, f);
  require_shape(dirichlet, g);
  double total = 0.0;
  for (const auto& [x, y] : dirichlet.edges())
    total += dirichlet.conductance(x, y) * (f(x) - f(y)) * (g(x) - g(y));
  return total;
}

double cheeger_energy(const DirichletStructure& dirichlet, const Density& f) {
  return 0.5 * energy_form(dirichlet, f, f);
}

double total_variation(const DirichletStructure& dirichlet, const Density& f) {
  const Density gamma = carre_du_champ(dirichlet, f);
  return (gamma.array().sqrt() * dirichlet.masses().array()).sum();
}

double perimeter(const DirichletStructure& dirichlet, const SubsetIndicator& set) {
  return total_variation(dirichlet, set.indicator());
}

Density metric_slope(const MetricMeasureSpace& space, const Density& f) {
  if (f.size() != space.size()) throw Error("function length does not match the space");
  Density slope = Density::Zero(f.size());
  for (Index x = 0; x < f.size(); ++x)
    for (Index y = 0; y < f.size(); ++y)
      if (y != x) slope(x) = std::max(slope(x), std::abs(f(y) - f(x)) / space.distance(x, y));
  return slope;
}

double rayleigh_quotient(const DirichletStructure& dirichlet, const Density& f) {
  require_shape(dirichlet, f);
  const double norm2 = (f.array().square() * dirichlet.masses().array()).sum();
  if (norm2 == 0.0) throw Error("Rayleigh quotient of the zero function");
  return 2.0 * cheeger_energy(dirichlet, f) / norm2;
}

}  // namespace semlab
