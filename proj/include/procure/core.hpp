#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace procure {

using Vector = std::vector<double>;

// Error taxonomy shared by every module.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IncompleteRun : std::logic_error {
  using std::logic_error::logic_error;
};
struct SequenceOverflow : std::logic_error {
  using std::logic_error::logic_error;
};

/// Primal norm of a hypothesis space. Dual norms are taken against it:
/// l2 is self-dual, the dual of l1 is the max-abs norm.
enum class NormKind { L2, L1 };

enum class SpaceKind { L2Ball, Simplex };

/// Bounded convex hypothesis set with its regularizer range.
///
/// The l2 ball is paired with G(h) = ||h||^2 / 2 (online gradient descent),
/// the simplex with shifted negative entropy (multiplicative weights).
/// `beta()` is sup G over the set, the constant in the FTRL regret bound.
class HypothesisSpace {
 public:
  static HypothesisSpace l2_ball(std::size_t dimension, double radius);
  static HypothesisSpace simplex(std::size_t dimension);

  SpaceKind kind() const { return kind_; }
  std::size_t dimension() const { return dimension_; }
  double radius() const { return radius_; }
  double beta() const;
  NormKind norm() const { return kind_ == SpaceKind::L2Ball ? NormKind::L2 : NormKind::L1; }

  bool contains(std::span<const double> v, double tol = 1e-9) const;

 private:
  HypothesisSpace(SpaceKind kind, std::size_t dimension, double radius)
      : kind_(kind), dimension_(dimension), radius_(radius) {}

  SpaceKind kind_;
  std::size_t dimension_;
  double radius_;
};

struct Hypothesis {
  Vector coords;

  std::size_t size() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  bool operator==(const Hypothesis&) const = default;
};

enum class LossKind { Hinge, Logistic, SquaredHinge, LinearSimplex };

/// A loss family. Squared hinge is scaled by 1/(1 + radius) so that it stays
/// 1-Lipschitz on a ball of that radius with ||x|| <= 1.
struct LossFamily {
  LossKind kind = LossKind::Hinge;
  double squared_hinge_scale = 1.0;

  static LossFamily hinge() { return {LossKind::Hinge, 1.0}; }
  static LossFamily logistic() { return {LossKind::Logistic, 1.0}; }
  static LossFamily squared_hinge(double radius) { return {LossKind::SquaredHinge, 1.0 / (1.0 + radius)}; }
  static LossFamily linear_simplex() { return {LossKind::LinearSimplex, 1.0}; }
};

struct LabeledPoint {
  Vector features;
  int label = 1;  // +1 or -1
};

struct CoinOutcome {
  std::size_t index = 0;  // 0 = heads, 1 = tails
};

/// The "no coin" point: loss 1 under every hypothesis, zero gradient.
struct NullPoint {};

using DataPoint = std::variant<LabeledPoint, CoinOutcome, NullPoint>;

struct Arrival {
  double cost = 0.0;
  DataPoint data;
};

double eval_loss(const LossFamily& family, std::span<const double> h, const DataPoint& z);
Vector eval_gradient(const LossFamily& family, std::span<const double> h, const DataPoint& z);

/// Dual norm of `v` for the given primal norm.
double dual_norm(NormKind primal, std::span<const double> v);
double primal_norm(NormKind primal, std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

/// Scales `x` in place so that ||x||_2 <= 1.
void normalize_features(Vector& x);

Hypothesis project(const HypothesisSpace& space, std::span<const double> v);

/// Misclassification indicator: sign(h.x) != y for labeled points (ties are
/// errors); the posted distribution's argmax missing the outcome for coins
/// (ties are errors); always 1 for null points.
double zero_one(std::span<const double> h, const DataPoint& z);

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

}  // namespace procure
