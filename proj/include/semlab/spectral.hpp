#pragma once

#include <vector>

#include "semlab/dirichlet.hpp"
#include "semlab/heat.hpp"
#include "semlab/space.hpp"

namespace semlab {

struct SpectralSummary {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  Vector eigenvalues;
  // Column i is the m-normalized eigenfunction of eigenvalues(i).
  Matrix eigenfunctions;
  // multiplicity[i]: size of the eigenvalue cluster containing index i.
  std::vector<int> multiplicity;

  Density eigenfunction(Index i) const { return eigenfunctions.col(i); }
};

SpectralSummary spectrum(const HeatOperator& heat);

struct CheegerResult {
  double value = 0.0;
  SubsetIndicator witness;
  bool exact = false;
};

inline constexpr int kCheegerEnumerationLimit = 22;

// min Per(A)/m(A) over nonempty A with m(A) <= m(X)/2, by enumerating all
// subsets. Ties go to the smallest bitmask.
CheegerResult h1_exact(const MetricMeasureSpace& space, const DirichletStructure& dirichlet,
                       int limit = kCheegerEnumerationLimit);
// Best threshold cut of the first nonconstant eigenfunction. An upper bound.
CheegerResult h1_sweep(const MetricMeasureSpace& space, const DirichletStructure& dirichlet,
                       const HeatOperator& heat);
// h1_exact when n is within the limit, h1_sweep otherwise.
CheegerResult h1_best(const MetricMeasureSpace& space, const DirichletStructure& dirichlet,
                      const HeatOperator& heat);

// On a space of finite total mass the whole space competes in the infimum
// with Per(X) = 0, so h0 = 0 with witness X.
CheegerResult h0(const MetricMeasureSpace& space, const DirichletStructure& dirichlet);
// Infimum of Per(A)/m(A) over nonempty proper subsets (diagnostic only).
CheegerResult h0_proper_subsets(const MetricMeasureSpace& space, const DirichletStructure& dirichlet,
                                int limit = kCheegerEnumerationLimit);

// 2 Per({f > 0}) ||f||_inf / ||f||_1 for mean-zero f, an upper bound for h1.
double norm_cheeg_upper(const MetricMeasureSpace& space, const DirichletStructure& dirichlet,
                        const Density& f);

// Throws unless |int f dm| <= 1e-10 ||f||_1.
void require_mean_zero(const MetricMeasureSpace& space, const Density& f, const char* what);

}  // namespace semlab
