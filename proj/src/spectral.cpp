#include "semlab/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace semlab {

SpectralSummary spectrum(const HeatOperator& heat) {
  SpectralSummary s;
  s.eigenvalues = heat.eigenvalues();
  s.eigenfunctions = heat.eigenvectors();
  s.lambda0 = s.eigenvalues(0);
  s.lambda1 = s.eigenvalues(1);
  const Index n = s.eigenvalues.size();
  s.multiplicity.assign(static_cast<std::size_t>(n), 1);
  Index start = 0;
  for (Index i = 1; i <= n; ++i) {
    const bool split = i == n || s.eigenvalues(i) - s.eigenvalues(i - 1) >
                                     1e-9 * (1.0 + std::abs(s.eigenvalues(i)));
    if (!split) continue;
    for (Index k = start; k < i; ++k) s.multiplicity[static_cast<std::size_t>(k)] = static_cast<int>(i - start);
    start = i;
  }
  return s;
}

namespace {

struct Best {
  double value = std::numeric_limits<double>::infinity();
  std::uint64_t bits = 0;
  bool found = false;

  void offer(double v, std::uint64_t b) {
    if (!found || v < value * (1.0 - 1e-12)) {
      value = v;
      bits = b;
      found = true;
    } else if (v <= value * (1.0 + 1e-12) && b < bits) {
      value = std::min(value, v);
      bits = b;
    }
  }
};

// Walks all nonempty subsets in Gray-code order, keeping the cut weight
// s(x) = sum of w_xy over y on the other side of x, so that
// Per(A) = sum_x sqrt(m(x) s(x) / 2).
template <class Accept>
Best enumerate_subsets(const MetricMeasureSpace& space, const DirichletStructure& dirichlet, int limit,
                       Accept accept) {
  const Index n = space.size();
  if (n > limit || n > 62)
    throw Error("exact Cheeger enumeration is limited to n <= " + std::to_string(limit) + " (n = " +
                std::to_string(n) + "); use h1_sweep");
  const Matrix& w = dirichlet.conductances();
  const Vector& m = space.masses();
  const Vector& deg = dirichlet.degrees();
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  Vector cut = Vector::Zero(n);
  double mass = 0.0;
  Best best;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto v = static_cast<Index>(std::countr_zero(k));
    auto& side = in[static_cast<std::size_t>(v)];
    side = !side;
    mass += side ? m(v) : -m(v);
    if ((k & 0xFFF) == 0) {
      for (Index x = 0; x < n; ++x) {
        double s = 0.0;
        for (Index y = 0; y < n; ++y)
          if (in[static_cast<std::size_t>(x)] != in[static_cast<std::size_t>(y)]) s += w(x, y);
        cut(x) = s;
      }
      mass = 0.0;
      for (Index x = 0; x < n; ++x)
        if (in[static_cast<std::size_t>(x)]) mass += m(x);
    } else {
      for (Index y = 0; y < n; ++y) {
        if (y == v || w(v, y) == 0.0) continue;
        cut(y) += in[static_cast<std::size_t>(y)] == side ? -w(v, y) : w(v, y);
      }
      cut(v) = deg(v) - cut(v);
    }
    const std::uint64_t bits = k ^ (k >> 1);
    if (!accept(mass, bits)) continue;
    double per = 0.0;
    for (Index x = 0; x < n; ++x) per += std::sqrt(std::max(0.0, m(x) * cut(x) * 0.5));
    best.offer(per / mass, bits);
  }
  return best;
}

CheegerResult finish(const MetricMeasureSpace& space, const DirichletStructure& dirichlet, const Best& best,
                     bool exact) {
  CheegerResult r;
  r.witness = SubsetIndicator::from_bitmask(space.size(), best.bits);
  r.value = perimeter(dirichlet, r.witness) / r.witness.measure(space);
  r.exact = exact;
  return r;
}

}  // namespace

CheegerResult h1_exact(const MetricMeasureSpace& space, const DirichletStructure& dirichlet, int limit) {
  const double half = 0.5 * space.total_mass() * (1.0 + 1e-12);
  const Best best = enumerate_subsets(space, dirichlet, limit,
                                      [half](double mass, std::uint64_t) { return mass <= half; });
  return finish(space, dirichlet, best, true);
}

CheegerResult h0_proper_subsets(const MetricMeasureSpace& space, const DirichletStructure& dirichlet,
                                int limit) {
  const std::uint64_t full = (std::uint64_t{1} << space.size()) - 1;
  const Best best = enumerate_subsets(space, dirichlet, limit,
                                      [full](double, std::uint64_t bits) { return bits != full; });
  return finish(space, dirichlet, best, true);
}

CheegerResult h0(const MetricMeasureSpace& space, const DirichletStructure&) {
  CheegerResult r;
  r.witness.mask.assign(static_cast<std::size_t>(space.size()), true);
  r.value = 0.0;
  r.exact = true;
  return r;
}

CheegerResult h1_sweep(const MetricMeasureSpace& space, const DirichletStructure& dirichlet,
                       const HeatOperator& heat) {
  const Index n = space.size();
  const Density phi = heat.eigenvectors().col(1);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&phi](Index a, Index b) { return phi(a) < phi(b); });
  const double total = space.total_mass();
  CheegerResult best;
  best.value = std::numeric_limits<double>::infinity();
  SubsetIndicator prefix;
  prefix.mask.assign(static_cast<std::size_t>(n), false);
  for (Index k = 0; k + 1 < n; ++k) {
    prefix.mask[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;
    const double mass = prefix.measure(space);
    const SubsetIndicator side = mass <= 0.5 * total * (1.0 + 1e-12) ? prefix : prefix.complement();
    const double value = perimeter(dirichlet, side) / side.measure(space);
    if (value < best.value) {
      best.value = value;
      best.witness = side;
    }
  }
  best.exact = false;
  return best;
}

CheegerResult h1_best(const MetricMeasureSpace& space, const DirichletStructure& dirichlet,
                      const HeatOperator& heat) {
  if (space.size() <= kCheegerEnumerationLimit) return h1_exact(space, dirichlet);
  return h1_sweep(space, dirichlet, heat);
}

void require_mean_zero(const MetricMeasureSpace& space, const Density& f, const char* what) {
  if (std::abs(integral(space, f)) > 1e-10 * l1_norm(space, f))
    throw Error(std::string(what) + " needs a function with zero mean");
}

double norm_cheeg_upper(const MetricMeasureSpace& space, const DirichletStructure& dirichlet,
                        const Density& f) {
  const double l1 = l1_norm(space, f);
  if (l1 == 0.0) throw Error("norm_cheeg_upper needs a nonzero function");
  require_mean_zero(space, f, "norm_cheeg_upper");
  const double per = perimeter(dirichlet, SubsetIndicator::from_predicate(f, true));
  return 2.0 * per * linf_norm(f) / l1;
}

}  // namespace semlab
