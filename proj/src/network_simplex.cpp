#include "semlab/network_simplex.hpp"

#include <cmath>
#include <limits>

namespace semlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class NetworkSimplex {
 public:
  NetworkSimplex(Index nodes, const std::vector<FlowArc>& arcs, const Vector& supply)
      : n_(nodes), root_(nodes), real_arcs_(arcs.size()) {
    double max_cost = 0.0;
    for (const auto& a : arcs) {
      if (a.from < 0 || a.from >= n_ || a.to < 0 || a.to >= n_) throw Error("arc endpoint out of range");
      if (!(a.cost >= 0.0) || !std::isfinite(a.cost)) throw Error("arc costs must be finite and >= 0");
      source_.push_back(a.from);
      target_.push_back(a.to);
      cost_.push_back(a.cost);
      max_cost = std::max(max_cost, a.cost);
    }
    flow_.assign(arcs.size(), 0.0);
    const double big = (static_cast<double>(n_) + 1.0) * (max_cost + 1.0);
    eps_ = 1e-12 * (1.0 + max_cost);

    // Supply nodes send to the root; all others (zero supply included) hang
    // from the root, which makes the initial tree strongly feasible.
    in_tree_.assign(arcs.size(), false);
    for (Index v = 0; v < n_; ++v) {
      const double s = supply(v);
      if (s > 0.0) add_artificial(v, root_, s, big);
      else add_artificial(root_, v, -s, big);
    }
    rebuild_tree();
  }

  MinCostFlow run() {
    MinCostFlow out;
    for (;;) {
      const std::size_t enter = select_entering();
      if (enter == kNone) break;
      pivot(enter);
      ++out.pivots;
    }
    double total_supply = 0.0, stranded = 0.0;
    for (std::size_t a = real_arcs_; a < flow_.size(); ++a) {
      stranded += flow_[a];
      total_supply += flow_[a];
    }
    for (std::size_t a = 0; a < real_arcs_; ++a) {
      out.cost += cost_[a] * flow_[a];
      total_supply += flow_[a];
    }
    // Artificial flow beyond round-off means the network could not route the supply.
    if (stranded > 1e-9 * (1.0 + total_supply)) throw Error("min-cost flow is infeasible");
    out.flow.assign(flow_.begin(), flow_.begin() + static_cast<std::ptrdiff_t>(real_arcs_));
    out.potential = potential_.head(n_) - Vector::Constant(n_, potential_(0));
    return out;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  void add_artificial(Index from, Index to, double flow, double cost) {
    source_.push_back(from);
    target_.push_back(to);
    cost_.push_back(cost);
    flow_.push_back(flow);
    in_tree_.push_back(true);
  }

  double reduced_cost(std::size_t a) const {
    return cost_[a] + potential_(source_[a]) - potential_(target_[a]);
  }

  std::size_t select_entering() const {
    std::size_t best = kNone;
    double best_value = -eps_;
    for (std::size_t a = 0; a < real_arcs_; ++a) {
      if (in_tree_[a]) continue;
      const double rc = reduced_cost(a);
      if (rc < best_value) {
        best_value = rc;
        best = a;
      }
    }
    return best;
  }

  // Parent pointers, depths and potentials from the current tree arc set.
  void rebuild_tree() {
    const Index total = n_ + 1;
    std::vector<std::vector<std::size_t>> adjacent(static_cast<std::size_t>(total));
    for (std::size_t a = 0; a < source_.size(); ++a) {
      if (!in_tree_[a]) continue;
      adjacent[static_cast<std::size_t>(source_[a])].push_back(a);
      adjacent[static_cast<std::size_t>(target_[a])].push_back(a);
    }
    parent_.assign(static_cast<std::size_t>(total), -1);
    pred_.assign(static_cast<std::size_t>(total), kNone);
    depth_.assign(static_cast<std::size_t>(total), 0);
    potential_ = Vector::Zero(total);
    std::vector<Index> stack{root_};
    std::vector<bool> seen(static_cast<std::size_t>(total), false);
    seen[static_cast<std::size_t>(root_)] = true;
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (std::size_t a : adjacent[static_cast<std::size_t>(u)]) {
        const Index v = source_[a] == u ? target_[a] : source_[a];
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = true;
        parent_[static_cast<std::size_t>(v)] = u;
        pred_[static_cast<std::size_t>(v)] = a;
        depth_[static_cast<std::size_t>(v)] = depth_[static_cast<std::size_t>(u)] + 1;
        // Tree arcs have zero reduced cost.
        potential_(v) = source_[a] == u ? potential_(u) + cost_[a] : potential_(u) - cost_[a];
        stack.push_back(v);
      }
    }
  }

  bool points_up(Index u) const { return source_[pred_[static_cast<std::size_t>(u)]] == u; }

  void pivot(std::size_t enter) {
    const Index first = source_[enter], second = target_[enter];
    Index a = first, b = second;
    while (a != b) {
      if (depth_[static_cast<std::size_t>(a)] >= depth_[static_cast<std::size_t>(b)])
        a = parent_[static_cast<std::size_t>(a)];
      else
        b = parent_[static_cast<std::size_t>(b)];
    }
    const Index join = a;

    // Flow runs join -> first along the first side and second -> join along
    // the second side. Ties go to the last blocking arc in cycle order.
    double delta = kInf;
    Index out_node = -1;
    for (Index u = first; u != join; u = parent_[static_cast<std::size_t>(u)]) {
      const double d = points_up(u) ? flow_[pred_[static_cast<std::size_t>(u)]] : kInf;
      if (d < delta) {
        delta = d;
        out_node = u;
      }
    }
    for (Index u = second; u != join; u = parent_[static_cast<std::size_t>(u)]) {
      const double d = points_up(u) ? kInf : flow_[pred_[static_cast<std::size_t>(u)]];
      if (d <= delta) {
        delta = d;
        out_node = u;
      }
    }
    if (out_node < 0 || !std::isfinite(delta)) throw Error("min-cost flow is unbounded");

    flow_[enter] += delta;
    for (Index u = first; u != join; u = parent_[static_cast<std::size_t>(u)])
      flow_[pred_[static_cast<std::size_t>(u)]] += points_up(u) ? -delta : delta;
    for (Index u = second; u != join; u = parent_[static_cast<std::size_t>(u)])
      flow_[pred_[static_cast<std::size_t>(u)]] += points_up(u) ? delta : -delta;

    const std::size_t leave = pred_[static_cast<std::size_t>(out_node)];
    flow_[leave] = std::max(0.0, flow_[leave]);
    in_tree_[leave] = false;
    in_tree_[enter] = true;
    rebuild_tree();
  }

  Index n_, root_;
  std::size_t real_arcs_;
  double eps_ = 0.0;
  std::vector<Index> source_, target_;
  std::vector<double> cost_, flow_;
  std::vector<bool> in_tree_;
  std::vector<Index> parent_;
  std::vector<std::size_t> pred_;
  std::vector<int> depth_;
  Vector potential_;
};

}  // namespace

MinCostFlow min_cost_flow(Index nodes, const std::vector<FlowArc>& arcs, const Vector& supply) {
  if (supply.size() != nodes) throw Error("supply vector has wrong length");
  NetworkSimplex solver(nodes, arcs, supply);
  return solver.run();
}

}  // namespace semlab
