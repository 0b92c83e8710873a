#include "semlab/transport.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "semlab/lp.hpp"
#include "semlab/network_simplex.hpp"

namespace semlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Arcs whose constraint f(x) - f(y) <= cost(x,y) is not implied by a detour
// through a third point. Costs are positive, so the implied constraints
// chain down to kept arcs.
std::vector<FlowArc> essential_arcs(const Matrix& cost) {
  const Index n = cost.rows();
  std::vector<FlowArc> arcs;
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) {
      if (x == y || !std::isfinite(cost(x, y))) continue;
      bool implied = false;
      for (Index z = 0; z < n && !implied; ++z)
        if (z != x && z != y && cost(x, z) + cost(z, y) <= cost(x, y) * (1.0 + 1e-14)) implied = true;
      if (!implied) arcs.push_back({x, y, cost(x, y)});
    }
  return arcs;
}

std::vector<FlowArc> all_arcs(const Matrix& cost) {
  std::vector<FlowArc> arcs;
  for (Index x = 0; x < cost.rows(); ++x)
    for (Index y = 0; y < cost.cols(); ++y)
      if (x != y && std::isfinite(cost(x, y))) arcs.push_back({x, y, cost(x, y)});
  return arcs;
}

// Smallest potential with f(anchor) = 0 satisfying the arc constraints and
// tight on every arc that carries flow (complementary slackness). This is a
// system of difference constraints; its pointwise minimum is -dist(anchor, .).
std::optional<Density> smallest_tight_potential(Index n, const std::vector<FlowArc>& arcs,
                                                const Vector& flow, Index anchor, double flow_tol) {
  struct Edge {
    Index from, to;
    double w;
  };
  std::vector<Edge> edges;
  double scale = 1.0;
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const auto& a = arcs[k];
    edges.push_back({a.from, a.to, a.cost});
    if (flow(static_cast<Index>(k)) > flow_tol) edges.push_back({a.to, a.from, -a.cost});
    scale += a.cost;
  }
  Vector dist = Vector::Constant(n, kInf);
  dist(anchor) = 0.0;
  for (Index round = 0; round < n; ++round) {
    bool changed = false;
    for (const auto& e : edges) {
      if (dist(e.from) + e.w < dist(e.to)) {
        dist(e.to) = dist(e.from) + e.w;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (const auto& e : edges)
    if (dist(e.from) + e.w < dist(e.to) - 1e-12 * scale) return std::nullopt;
  if (!dist.allFinite()) return std::nullopt;
  return Density((-dist).array() + 0.0);
}

struct PotentialLp {
  std::vector<FlowArc> arcs;
  Vector flow;
  Density potential;
  double primal = 0.0;
  double dual = 0.0;
};

// max supply'f subject to f(x) - f(y) <= cost(x,y), solved through its
// standard-form dual (min-cost flow over the essential arcs).
PotentialLp solve_potential_lp(const Matrix& cost, const Vector& supply, Index anchor) {
  const Index n = cost.rows();
  PotentialLp out;
  out.arcs = essential_arcs(cost);
  const auto m = static_cast<Index>(out.arcs.size());
  Matrix a = Matrix::Zero(n, m);
  Vector c(m);
  for (Index k = 0; k < m; ++k) {
    const auto& arc = out.arcs[static_cast<std::size_t>(k)];
    a(arc.from, k) = 1.0;
    a(arc.to, k) = -1.0;
    c(k) = arc.cost;
  }
  const LpResult lp = solve_standard_form(a, supply, c);
  if (lp.status != LpStatus::Optimal) throw Error("transport LP did not reach an optimum");
  out.flow = lp.x;
  out.primal = lp.objective;
  const double flow_tol = 1e-12 * (1.0 + supply.cwiseAbs().sum());
  if (auto f = smallest_tight_potential(n, out.arcs, lp.x, anchor, flow_tol)) {
    out.potential = *f;
  } else {
    out.potential = lp.y - Vector::Constant(n, lp.y(anchor));
  }
  out.dual = supply.dot(out.potential);
  return out;
}

// Split an acyclic arc flow into source-to-sink shipments.
Matrix coupling_from_flow(const std::vector<FlowArc>& arcs, const Vector& flow, const Vector& a,
                          const Vector& b) {
  const Index n = a.size();
  Matrix plan = Matrix::Zero(n, n);
  for (Index x = 0; x < n; ++x) plan(x, x) = std::min(a(x), b(x));
  Vector excess = a - b;
  Vector residual = flow;
  const double tol = 1e-13 * (1.0 + a.sum());
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < arcs.size(); ++k)
    if (flow(static_cast<Index>(k)) > tol) out[static_cast<std::size_t>(arcs[k].from)].push_back(k);

  for (Index x = 0; x < n; ++x) {
    int guard = 0;
    while (excess(x) > tol && guard++ < 4 * n * n) {
      std::vector<std::size_t> path;
      Index u = x;
      bool reached = false;
      for (Index step = 0; step <= n; ++step) {
        std::size_t next = arcs.size();
        for (std::size_t k : out[static_cast<std::size_t>(u)])
          if (residual(static_cast<Index>(k)) > tol) {
            next = k;
            break;
          }
        if (next == arcs.size()) break;
        path.push_back(next);
        u = arcs[next].to;
        if (excess(u) < -tol) {
          reached = true;
          break;
        }
      }
      if (!reached) break;
      double amount = std::min(excess(x), -excess(u));
      for (std::size_t k : path) amount = std::min(amount, residual(static_cast<Index>(k)));
      for (std::size_t k : path) residual(static_cast<Index>(k)) -= amount;
      excess(x) -= amount;
      excess(u) += amount;
      plan(x, u) += amount;
    }
  }
  return plan;
}

Matrix pair_costs(const MetricMeasureSpace& space) {
  Matrix cost = space.distances();
  cost.diagonal().setConstant(kInf);
  return cost;
}

}  // namespace

TransportCertificate w1(const MetricMeasureSpace& space, const AtomicMeasure& mu0,
                        const AtomicMeasure& mu1) {
  const Index n = space.size();
  if (!mu0.nonnegative() || !mu1.nonnegative()) throw Error("W1 needs nonnegative measures");
  const Vector a = mu0.weights(n);
  Vector b = mu1.weights(n);
  const double mass0 = a.sum(), mass1 = b.sum();
  if (std::abs(mass0 - mass1) > kMassBalanceTolerance * std::max({mass0, mass1, 1e-300}))
    throw Error("W1 needs equal total masses (got " + std::to_string(mass0) + " and " +
                std::to_string(mass1) + ")");
  if (mass1 > 0.0) b *= mass0 / mass1;
  const Vector supply = a - b;
  const Matrix cost = pair_costs(space);

  const PotentialLp lp = solve_potential_lp(cost, supply, 0);
  TransportCertificate cert;
  cert.value = std::max(0.0, lp.dual);
  cert.potential = lp.potential;
  cert.plan = coupling_from_flow(lp.arcs, lp.flow, a, b);
  cert.primal_value = min_cost_flow(n, all_arcs(cost), supply).cost;
  cert.duality_gap = std::abs(cert.primal_value - lp.dual);
  return cert;
}

TransportCertificate bl_star(const MetricMeasureSpace& space, const AtomicMeasure& mu0,
                             const AtomicMeasure& mu1) {
  const Index n = space.size();
  const Vector net = mu0.weights(n) - mu1.weights(n);
  // A ground point at cost 1 from every point absorbs unbalanced mass; with
  // the ground potential pinned to 0 its arcs encode |f| <= 1.
  Matrix cost = Matrix::Constant(n + 1, n + 1, 1.0);
  cost.topLeftCorner(n, n) = pair_costs(space);
  cost(n, n) = kInf;
  Vector supply(n + 1);
  supply.head(n) = net;
  supply(n) = -net.sum();

  const PotentialLp lp = solve_potential_lp(cost, supply, n);
  TransportCertificate cert;
  cert.potential = lp.potential.head(n);
  cert.value = std::max(0.0, net.dot(cert.potential));
  cert.primal_value = min_cost_flow(n + 1, all_arcs(cost), supply).cost;
  cert.duality_gap = std::abs(cert.primal_value - cert.value);
  return cert;
}

}  // namespace semlab
