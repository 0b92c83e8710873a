#include "semlab/heat.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "semlab/generate.hpp"

namespace semlab {

namespace {

void require_time(double t, bool strictly_positive) {
  if (!std::isfinite(t) || t < 0.0 || (strictly_positive && t == 0.0))
    throw Error(strictly_positive ? "time must be > 0" : "time must be >= 0");
}

}  // namespace

HeatOperator::HeatOperator(MetricMeasureSpace space, DirichletStructure dirichlet)
    : space_(std::move(space)), dirichlet_(std::move(dirichlet)) {
  const Index n = space_.size();
  if (dirichlet_.size() != n) throw Error("space and dirichlet structure differ in size");
  if ((space_.masses() - dirichlet_.masses()).cwiseAbs().maxCoeff() != 0.0)
    throw Error("dirichlet structure was built for different masses");

  const Vector inv_sqrt_m = space_.masses().cwiseSqrt().cwiseInverse();
  // -Lap = M^{-1} (D - W); symmetrize with M^{1/2}.
  const Matrix sym = inv_sqrt_m.asDiagonal() * (-dirichlet_.graph_laplacian()) * inv_sqrt_m.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (sym + sym.transpose()));
  if (solver.info() != Eigen::Success) throw Error("eigensolver failed");

  eigenvalues_ = solver.eigenvalues().cwiseMax(0.0);
  eigenvectors_ = inv_sqrt_m.asDiagonal() * solver.eigenvectors();

  // Deterministic signs: the largest-magnitude entry (first on ties) is positive.
  for (Index i = 0; i < n; ++i) {
    auto col = eigenvectors_.col(i);
    const double peak = col.cwiseAbs().maxCoeff();
    for (Index x = 0; x < n; ++x) {
      if (std::abs(col(x)) >= peak * (1.0 - 1e-9)) {
        if (col(x) < 0.0) col = -col;
        break;
      }
    }
  }

  const Matrix minus_lap = -dirichlet_.graph_laplacian();
  for (Index i = 0; i < n; ++i) {
    const Vector r = (minus_lap * eigenvectors_.col(i)).cwiseQuotient(space_.masses()) -
                     eigenvalues_(i) * eigenvectors_.col(i);
    const double scaled = r.cwiseAbs().maxCoeff() / (1.0 + eigenvalues_(i));
    residual_ = std::max(residual_, scaled);
  }
  if (residual_ > 1e-9) throw Error("eigendecomposition residual too large");

  calibration_ratio_ = semlab::calibration_ratio(space_, dirichlet_);
}

HeatOperator build_heat_operator(const MetricMeasureSpace& space, const DirichletStructure& dirichlet) {
  return HeatOperator(space, dirichlet);
}

Vector HeatOperator::decay(double t) const { return (-t * eigenvalues_.array()).exp().matrix(); }

Density HeatOperator::apply(double t, const Density& f) const {
  require_time(t, false);
  if (f.size() != size()) throw Error("function length does not match the space");
  if (t == 0.0) return f;
  const Vector coeff = eigenvectors_.transpose() * f.cwiseProduct(space_.masses());
  return eigenvectors_ * decay(t).cwiseProduct(coeff);
}

Matrix HeatOperator::kernel(double t) const {
  require_time(t, true);
  return eigenvectors_ * decay(t).asDiagonal() * eigenvectors_.transpose();
}

Density HeatOperator::kernel_density(double t, Index x) const {
  require_time(t, true);
  if (x < 0 || x >= size()) throw Error("point index out of range");
  return eigenvectors_ * decay(t).cwiseProduct(eigenvectors_.row(x).transpose());
}

AtomicMeasure HeatOperator::dual_measure(double t, const AtomicMeasure& mu) const {
  require_time(t, true);
  const Matrix k = kernel(t);
  Vector out = Vector::Zero(size());
  for (const auto& atom : mu.atoms()) {
    if (atom.point < 0 || atom.point >= size()) throw Error("atom outside the point set");
    out += atom.weight * k.row(atom.point).transpose();
  }
  return AtomicMeasure::from_weights(out.cwiseProduct(space_.masses()));
}

std::pair<Index, Index> HeatOperator::c_star_pair(double t) const {
  const Matrix k = kernel(t);
  const Vector& m = space_.masses();
  double best = -1.0;
  std::pair<Index, Index> arg{0, 1};
  for (Index x = 0; x < size(); ++x)
    for (Index y = x + 1; y < size(); ++y) {
      const double v = ((k.row(x) - k.row(y)).cwiseAbs() * m)(0) / space_.distance(x, y);
      if (v > best) {
        best = v;
        arg = {x, y};
      }
    }
  return arg;
}

double HeatOperator::c_star(double t) const {
  const Matrix k = kernel(t);
  const Vector& m = space_.masses();
  double best = 0.0;
  for (Index x = 0; x < size(); ++x)
    for (Index y = x + 1; y < size(); ++y)
      best = std::max(best, ((k.row(x) - k.row(y)).cwiseAbs() * m)(0) / space_.distance(x, y));
  return best;
}

double HeatOperator::theta(double t) const { return kernel(t).maxCoeff(); }

// ---- integration by parts --------------------------------------------------

IbpResidual check_heat_ibp(const HeatOperator& heat, double t, const Density& f, const Density& g) {
  require_time(t, true);
  const auto& space = heat.space();
  IbpResidual out;
  out.lhs = inner(space, g, f - heat.apply(t, f));

  auto integrand = [&](double s) { return energy_form(heat.dirichlet(), f, heat.apply(s, g)); };
  using Rule = boost::math::quadrature::gauss<double, 10>;
  auto composite = [&](int panels) {
    const double h = t / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) total += Rule::integrate(integrand, k * h, (k + 1) * h);
    return total;
  };
  double previous = composite(1);
  for (int panels = 2; panels <= (1 << 16); panels *= 2) {
    const double current = composite(panels);
    const bool converged = std::abs(current - previous) <= 1e-10 * std::max(1.0, std::abs(current));
    previous = current;
    if (converged) break;
  }
  out.rhs = previous;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

// ---- smoothing profile -----------------------------------------------------

std::vector<double> log_grid(double t_min, double t_max, int count) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || count < 1) throw Error("invalid log grid");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = t_max;
    return grid;
  }
  const double a = std::log(t_min), b = std::log(t_max);
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  grid.front() = t_min;
  grid.back() = t_max;
  return grid;
}

namespace {

// Bisection on the Kronrod/Gauss difference of each panel, relative to the
// panel's own value.
template <class F>
double adaptive_kronrod(const F& f, double a, double b, int depth) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  const double k = Kronrod::integrate(f, a, b, 0, 0.0);
  const double g = Gauss::integrate(f, a, b);
  if (depth == 0 || std::abs(k - g) <= 1e-13 * std::abs(k)) return k;
  const double mid = 0.5 * (a + b);
  if (mid <= a || mid >= b) return k;
  return adaptive_kronrod(f, a, mid, depth - 1) + adaptive_kronrod(f, mid, b, depth - 1);
}

}  // namespace

double integrate_c_star(const HeatOperator& heat, double a, double b) {
  if (b <= a) return 0.0;
  auto c = [&heat](double s) { return s <= 0.0 ? heat.c_star(1e-300) : heat.c_star(s); };
  return adaptive_kronrod(c, a, b, 30);
}

SmoothingProfile::SmoothingProfile(const HeatOperator& heat, std::vector<double> grid)
    : heat_(&heat), grid_(std::move(grid)) {
  if (grid_.empty()) throw Error("smoothing profile needs a non-empty grid");
  if (!std::is_sorted(grid_.begin(), grid_.end()) || !(grid_.front() > 0.0))
    throw Error("smoothing grid must be positive and ascending");
  double acc = 0.0, last = 0.0;
  for (double t : grid_) {
    acc += integrate_c_star(heat, last, t);
    last = t;
    c_star_.push_back(heat.c_star(t));
    primitive_.push_back(acc);
    theta_.push_back(heat.theta(t));
  }
}

double SmoothingProfile::c_star(double t) const {
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
  if (it != grid_.end() && *it == t) return c_star_[static_cast<std::size_t>(it - grid_.begin())];
  return heat_->c_star(t);
}

double SmoothingProfile::theta(double t) const {
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
  if (it != grid_.end() && *it == t) return theta_[static_cast<std::size_t>(it - grid_.begin())];
  return heat_->theta(t);
}

double SmoothingProfile::primitive(double t) const {
  require_time(t, false);
  if (t == 0.0) return 0.0;
  // Largest node <= t.
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  if (it == grid_.begin()) return integrate_c_star(*heat_, 0.0, t);
  const auto k = static_cast<std::size_t>(it - grid_.begin()) - 1;
  return primitive_[k] + integrate_c_star(*heat_, grid_[k], t);
}

}  // namespace semlab
