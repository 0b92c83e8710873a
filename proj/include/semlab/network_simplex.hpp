#pragma once

#include <vector>

#include "semlab/space.hpp"

namespace semlab {

struct FlowArc {
  Index from = 0;
  Index to = 0;
  double cost = 0.0;
};

struct MinCostFlow {
  double cost = 0.0;
  std::vector<double> flow;  // per input arc
  Vector potential;          // node potentials, reduced cost c + p(from) - p(to) >= 0
  int pivots = 0;
};

// Primal network simplex for uncapacitated min-cost flow with node supplies
// (positive = source). Supplies must sum to zero up to round-off; the residue
// is absorbed by the artificial root. Strongly feasible spanning trees with
// the last-blocking-arc leaving rule, so degenerate pivots cannot cycle.
MinCostFlow min_cost_flow(Index nodes, const std::vector<FlowArc>& arcs, const Vector& supply);

}  // namespace semlab
