#pragma once

#include "semlab/space.hpp"

namespace semlab {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;          // primal solution
  Vector y;          // simplex multipliers: optimal solution of max b'y s.t. A'y <= c
  double objective = 0.0;
  int pivots = 0;
};

// Dense two-phase tableau simplex for
//   min c'x  subject to  A x = b,  x >= 0.
// Rows of A may be linearly dependent. Dantzig pricing, switching to Bland's
// rule during long degenerate runs.
LpResult solve_standard_form(const Matrix& a, const Vector& b, const Vector& c, double eps = 1e-10);

}  // namespace semlab
