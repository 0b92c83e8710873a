#pragma once

#include <optional>

#include "semlab/space.hpp"

namespace semlab {

// Result of a Kantorovich-type dual problem, certified by an independent
// primal min-cost flow.
struct TransportCertificate {
  double value = 0.0;           // dual LP value: int f d(mu0 - mu1)
  Density potential;            // optimal dual potential f
  std::optional<Matrix> plan;   // coupling with marginals mu0, mu1 (W1 only)
  double primal_value = 0.0;    // network-simplex min-cost flow value
  double duality_gap = 0.0;     // |primal_value - value|
};

// Wasserstein-1 distance between nonnegative measures of equal mass.
//
// The dual potential is the pointwise smallest optimal potential with
// f(0) = 0 (optimal potentials are only determined up to a constant).
// Throws on negative atoms or unequal masses.
TransportCertificate w1(const MetricMeasureSpace& space, const AtomicMeasure& mu0,
                        const AtomicMeasure& mu1);

// Bounded-Lipschitz dual distance: sup of int f d(mu0 - mu1) over f with
// Lip(f) <= 1 and |f| <= 1. Signed measures and unequal masses are allowed.
// Returns the pointwise smallest optimal potential.
TransportCertificate bl_star(const MetricMeasureSpace& space, const AtomicMeasure& mu0,
                             const AtomicMeasure& mu1);

// Relative tolerance on the mass balance accepted by w1().
inline constexpr double kMassBalanceTolerance = 1e-9;

}  // namespace semlab
