#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace semlab {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A function on the point set. All L^p spaces coincide on a finite space, so a
// plain vector of values represents f in every one of them.
using Density = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite metric-measure space: distance matrix d and point masses m.
// Only shapes are checked on construction; axioms are reported by
// validate_space() so that broken inputs can still be diagnosed.
class MetricMeasureSpace {
 public:
  MetricMeasureSpace(Matrix d, Vector m);

  Index size() const { return m_.size(); }
  const Matrix& distances() const { return d_; }
  double distance(Index x, Index y) const { return d_(x, y); }
  const Vector& masses() const { return m_; }
  double mass(Index x) const { return m_(x); }
  double total_mass() const { return m_.sum(); }
  double diameter() const { return d_.maxCoeff(); }

 private:
  Matrix d_;
  Vector m_;
};

// ---- densities -------------------------------------------------------------

double integral(const MetricMeasureSpace& space, const Density& f);
double inner(const MetricMeasureSpace& space, const Density& f, const Density& g);
double l1_norm(const MetricMeasureSpace& space, const Density& f);
double l2_norm(const MetricMeasureSpace& space, const Density& f);
double linf_norm(const Density& f);
Density positive_part(const Density& f);
Density negative_part(const Density& f);

// Largest |f(x)-f(y)|/d(x,y) over distinct pairs.
double lipschitz_constant(const MetricMeasureSpace& space, const Density& f);

// ---- subsets ---------------------------------------------------------------

struct SubsetIndicator {
  std::vector<bool> mask;

  static SubsetIndicator from_bitmask(Index n, std::uint64_t bits);
  static SubsetIndicator from_predicate(const Density& f, bool strictly_positive);

  Index size() const { return static_cast<Index>(mask.size()); }
  bool contains(Index x) const { return mask[static_cast<std::size_t>(x)]; }
  Index count() const;
  bool empty() const { return count() == 0; }
  bool full() const { return count() == size(); }
  double measure(const MetricMeasureSpace& space) const;
  SubsetIndicator complement() const;
  Density indicator() const;
  std::uint64_t bitmask() const;
  std::string to_string() const;
};

// ---- measures --------------------------------------------------------------

struct Atom {
  Index point = 0;
  double weight = 0.0;
};

// Finite signed measure on the point set; atom weights are absolute masses.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

  static AtomicMeasure dirac(Index x, double weight = 1.0);
  // The measure f m, one atom per point.
  static AtomicMeasure from_density(const MetricMeasureSpace& space, const Density& f);
  static AtomicMeasure from_weights(const Vector& weights);

  const std::vector<Atom>& atoms() const { return atoms_; }
  // Dense weight vector of length n; repeated atoms accumulate.
  Vector weights(Index n) const;
  double total_mass() const;
  double total_variation() const;
  bool nonnegative() const;

 private:
  std::vector<Atom> atoms_;
};

// ---- validation ------------------------------------------------------------

struct Violation {
  std::string axiom;
  std::vector<Index> witness;
  std::string detail;
};

std::vector<Violation> validate_space(const MetricMeasureSpace& space, double tol = 1e-12);

}  // namespace semlab
