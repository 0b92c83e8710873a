#include "semlab/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace semlab {

namespace {

class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b, double eps)
      : m_(a.rows()), n_(a.cols()), eps_(eps), t_(Matrix::Zero(a.rows() + 1, a.cols() + a.rows() + 1)) {
    sign_.resize(m_);
    for (Index i = 0; i < m_; ++i) {
      sign_(i) = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign_(i) * a.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, rhs()) = sign_(i) * b(i);
      basis_.push_back(n_ + i);
    }
  }

  Index rhs() const { return n_ + m_; }

  void price(const Vector& cost) {
    for (Index j = 0; j <= rhs(); ++j) {
      double v = j < rhs() ? cost(j) : 0.0;
      for (Index i = 0; i < m_; ++i) v -= cost(basis_[static_cast<std::size_t>(i)]) * t_(i, j);
      t_(m_, j) = v;
    }
  }

  // Returns false when unbounded.
  bool optimize(Index allowed_columns, int& pivots) {
    int degenerate_run = 0;
    const int bland_after = static_cast<int>(2 * (m_ + n_)) + 50;
    for (;;) {
      const bool bland = degenerate_run > bland_after;
      Index enter = -1;
      double best = -eps_;
      for (Index j = 0; j < allowed_columns; ++j) {
        if (t_(m_, j) < best) {
          enter = j;
          if (bland) break;
          best = t_(m_, j);
        }
      }
      if (enter < 0) return true;

      Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i) {
        const double p = t_(i, enter);
        if (p <= eps_) continue;
        const double r = t_(i, rhs()) / p;
        if (leave < 0 || r < ratio - 1e-13) {
          ratio = r;
          leave = i;
        } else if (r <= ratio + 1e-13 &&
                   basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) {
          ratio = std::min(ratio, r);
          leave = i;
        }
      }
      if (leave < 0) return false;
      degenerate_run = ratio <= eps_ ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      ++pivots;
    }
  }

  void pivot(Index row, Index col) {
    t_.row(row) /= t_(row, col);
    for (Index i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double factor = t_(i, col);
      if (factor != 0.0) t_.row(i) -= factor * t_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // Pivot basic artificials out where possible; rows that cannot be cleared
  // are redundant and keep their artificial at level zero.
  void drive_out_artificials() {
    for (Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_) continue;
      Index col = -1;
      double best = eps_;
      for (Index j = 0; j < n_; ++j) {
        if (std::abs(t_(i, j)) > best) {
          best = std::abs(t_(i, j));
          col = j;
        }
      }
      if (col >= 0) pivot(i, col);
    }
  }

  double objective() const { return -t_(m_, rhs()); }

  Vector primal() const {
    Vector x = Vector::Zero(n_);
    for (Index i = 0; i < m_; ++i) {
      const Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) x(j) = std::max(0.0, t_(i, rhs()));
    }
    return x;
  }

  // Multipliers of the original rows, read off the artificial columns
  // (cost zero in phase two).
  Vector multipliers() const {
    Vector y(m_);
    for (Index i = 0; i < m_; ++i) y(i) = -sign_(i) * t_(m_, n_ + i);
    return y;
  }

 private:
  Index m_, n_;
  double eps_;
  Matrix t_;
  Vector sign_;
  std::vector<Index> basis_;
};

}  // namespace

LpResult solve_standard_form(const Matrix& a, const Vector& b, const Vector& c, double eps) {
  if (a.rows() != b.size() || a.cols() != c.size()) throw Error("LP dimensions do not agree");
  const Index m = a.rows(), n = a.cols();
  Tableau tab(a, b, eps);
  LpResult result;

  Vector phase1 = Vector::Zero(n + m);
  phase1.tail(m).setOnes();
  tab.price(phase1);
  tab.optimize(n + m, result.pivots);
  const double scale = 1.0 + b.cwiseAbs().sum();
  if (tab.objective() > 1e-9 * scale) {
    result.status = LpStatus::Infeasible;
    return result;
  }
  tab.drive_out_artificials();

  Vector phase2 = Vector::Zero(n + m);
  phase2.head(n) = c;
  tab.price(phase2);
  if (!tab.optimize(n, result.pivots)) {
    result.status = LpStatus::Unbounded;
    return result;
  }
  result.status = LpStatus::Optimal;
  result.x = tab.primal();
  result.y = tab.multipliers();
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace semlab
