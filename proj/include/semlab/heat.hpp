#pragma once

#include <utility>
#include <vector>

#include "semlab/dirichlet.hpp"
#include "semlab/space.hpp"

namespace semlab {

// Heat semigroup H_t = exp(t Lap) through the m-orthonormal eigenbasis of -Lap.
//
// Eigenvalues are sorted ascending with lambda_0 = 0 (clamped from round-off).
// The heat kernel density h_t[x](y) = sum_i exp(-lambda_i t) phi_i(x) phi_i(y)
// is symmetric and satisfies H_t f(x) = sum_y h_t[x](y) f(y) m(y).
class HeatOperator {
 public:
  HeatOperator(MetricMeasureSpace space, DirichletStructure dirichlet);

  const MetricMeasureSpace& space() const { return space_; }
  const DirichletStructure& dirichlet() const { return dirichlet_; }
  Index size() const { return space_.size(); }

  const Vector& eigenvalues() const { return eigenvalues_; }
  // Column i is phi_i with sum_x phi_i(x) phi_j(x) m(x) = delta_ij.
  const Matrix& eigenvectors() const { return eigenvectors_; }
  double residual() const { return residual_; }
  // max_x Q(x) of the metric against the conductances; <= 1 when calibrated.
  double calibration_ratio() const { return calibration_ratio_; }
  bool calibrated() const { return calibration_ratio_ <= 1.0 + 1e-12; }

  Density apply(double t, const Density& f) const;
  // Matrix of h_t[x](y), rows indexed by x.
  Matrix kernel(double t) const;
  Density kernel_density(double t, Index x) const;
  AtomicMeasure dual_measure(double t, const AtomicMeasure& mu) const;

  // Optimal L^inf-to-Lip constant: max_{x != y} ||h_t[x] - h_t[y]||_1 / d(x,y).
  double c_star(double t) const;
  // The pair (x, y) attaining c_star(t).
  std::pair<Index, Index> c_star_pair(double t) const;
  // L^1 -> L^inf norm of H_t: max_{x,y} h_t[x](y).
  double theta(double t) const;

 private:
  Vector decay(double t) const;

  MetricMeasureSpace space_;
  DirichletStructure dirichlet_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
  double residual_ = 0.0;
  double calibration_ratio_ = 0.0;
};

HeatOperator build_heat_operator(const MetricMeasureSpace& space, const DirichletStructure& dirichlet);

struct IbpResidual {
  double lhs = 0.0;  // int g (f - H_t f) dm
  double rhs = 0.0;  // int_0^t int Df . D H_s g dm ds, by quadrature
  double residual = 0.0;
};

// Heat integration by parts, right side integrated with composite
// Gauss-Legendre under interval doubling.
IbpResidual check_heat_ibp(const HeatOperator& heat, double t, const Density& f, const Density& g);

// Default time grid: 40 log-spaced points in [1e-3, 1].
std::vector<double> log_grid(double t_min = 1e-3, double t_max = 1.0, int count = 40);

// c_star, its primitive C_star(t) = int_0^t c_star, and theta tabulated on a
// time grid. Off-grid primitives integrate from the nearest node below, so the
// profile stays immutable and shareable between threads.
class SmoothingProfile {
 public:
  SmoothingProfile(const HeatOperator& heat, std::vector<double> grid);

  const HeatOperator& heat() const { return *heat_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& c_star_values() const { return c_star_; }
  const std::vector<double>& primitive_values() const { return primitive_; }
  const std::vector<double>& theta_values() const { return theta_; }

  double c_star(double t) const;
  double primitive(double t) const;
  double theta(double t) const;

 private:
  const HeatOperator* heat_;
  std::vector<double> grid_;
  std::vector<double> c_star_;
  std::vector<double> primitive_;
  std::vector<double> theta_;
};

// int_a^b c_star(s) ds by adaptive Gauss-Kronrod.
double integrate_c_star(const HeatOperator& heat, double a, double b);

}  // namespace semlab
