#pragma once

#include "semlab/space.hpp"

namespace semlab {

// Symmetric conductances w on the point set together with the masses they act
// against. The graph {w > 0} must be connected.
//
//   Laplacian       (Lap f)(x) = (1/m(x)) sum_y w_xy (f(y) - f(x))
//   carre du champ  Gamma(f)(x) = (1/(2 m(x))) sum_y w_xy (f(y) - f(x))^2
//
// Lap is self-adjoint and negative semidefinite in L^2(m), and the weak
// gradient is |Df|_w = sqrt(Gamma(f)).
class DirichletStructure {
 public:
  DirichletStructure(Matrix w, Vector m);
  DirichletStructure(const MetricMeasureSpace& space, Matrix w)
      : DirichletStructure(std::move(w), space.masses()) {}

  Index size() const { return m_.size(); }
  const Matrix& conductances() const { return w_; }
  double conductance(Index x, Index y) const { return w_(x, y); }
  const Vector& masses() const { return m_; }
  // Weighted degree sum_y w_xy.
  const Vector& degrees() const { return degree_; }
  // Dense Laplacian matrix (not divided by m): L = W - diag(degree).
  Matrix graph_laplacian() const;
  // Edge list with x < y.
  const std::vector<std::pair<Index, Index>>& edges() const { return edges_; }

  static bool connected(const Matrix& w);

 private:
  Matrix w_;
  Vector m_;
  Vector degree_;
  std::vector<std::pair<Index, Index>> edges_;
};

Density carre_du_champ(const DirichletStructure& dirichlet, const Density& f);
Density laplacian_apply(const DirichletStructure& dirichlet, const Density& f);
// Ch(f) = 1/2 int Gamma(f) dm.
double cheeger_energy(const DirichletStructure& dirichlet, const Density& f);
// int Df . Dg dm = sum_{x<y} w_xy (f(x)-f(y)) (g(x)-g(y)).
double energy_form(const DirichletStructure& dirichlet, const Density& f, const Density& g);
// TV(f) = int sqrt(Gamma(f)) dm.
double total_variation(const DirichletStructure& dirichlet, const Density& f);
double perimeter(const DirichletStructure& dirichlet, const SubsetIndicator& set);
// |Df|(x) = max_{y != x} |f(y)-f(x)| / d(x,y).
Density metric_slope(const MetricMeasureSpace& space, const Density& f);
// R(f) = 2 Ch(f) / ||f||_2^2. Throws on f = 0.
double rayleigh_quotient(const DirichletStructure& dirichlet, const Density& f);

}  // namespace semlab
