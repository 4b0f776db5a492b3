#include "procure/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace procure {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_labeled(std::span<const double> h, const LabeledPoint& p) {
  if (p.features.size() != h.size()) {
    throw InvalidInput("feature dimension " + std::to_string(p.features.size()) +
                       " does not match hypothesis dimension " + std::to_string(h.size()));
  }
}

void check_outcome(std::span<const double> h, const CoinOutcome& c) {
  if (c.index >= h.size()) {
    throw InvalidInput("outcome index " + std::to_string(c.index) + " out of range for dimension " +
                       std::to_string(h.size()));
  }
}

}  // namespace

HypothesisSpace HypothesisSpace::l2_ball(std::size_t dimension, double radius) {
  if (dimension < 1) throw InvalidConfig("hypothesis space dimension must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidConfig("l2 ball radius must be positive and finite");
  return HypothesisSpace(SpaceKind::L2Ball, dimension, radius);
}

HypothesisSpace HypothesisSpace::simplex(std::size_t dimension) {
  if (dimension < 1) throw InvalidConfig("hypothesis space dimension must be >= 1");
  return HypothesisSpace(SpaceKind::Simplex, dimension, 1.0);
}

double HypothesisSpace::beta() const {
  if (kind_ == SpaceKind::L2Ball) return radius_ * radius_ / 2.0;
  return std::log(static_cast<double>(dimension_));
}

bool HypothesisSpace::contains(std::span<const double> v, double tol) const {
  if (v.size() != dimension_) return false;
  if (kind_ == SpaceKind::L2Ball) return l2_norm(v) <= radius_ * (1.0 + tol) + tol;
  double sum = 0.0;
  for (double x : v) {
    if (x < -tol) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void normalize_features(Vector& x) {
  const double n = l2_norm(x);
  if (n > 1.0) {
    for (double& v : x) v /= n;
  }
}

double eval_loss(const LossFamily& family, std::span<const double> h, const DataPoint& z) {
  return std::visit(
      Overloaded{
          [&](const LabeledPoint& p) -> double {
            check_labeled(h, p);
            if (family.kind == LossKind::LinearSimplex) throw InvalidInput("linear-simplex loss needs a coin outcome");
            const double margin = p.label * dot(h, p.features);
            switch (family.kind) {
              case LossKind::Hinge:
                return std::max(0.0, 1.0 - margin);
              case LossKind::Logistic:
                return margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
              case LossKind::SquaredHinge: {
                const double slack = std::max(0.0, 1.0 - margin);
                return 0.5 * family.squared_hinge_scale * slack * slack;
              }
              default:
                break;
            }
            throw InvalidInput("unsupported loss family");
          },
          [&](const CoinOutcome& c) -> double {
            if (family.kind != LossKind::LinearSimplex) throw InvalidInput("coin outcomes need the linear-simplex loss");
            check_outcome(h, c);
            return 1.0 - h[c.index];
          },
          [&](const NullPoint&) -> double { return 1.0; },
      },
      z);
}

Vector eval_gradient(const LossFamily& family, std::span<const double> h, const DataPoint& z) {
  return std::visit(
      Overloaded{
          [&](const LabeledPoint& p) -> Vector {
            check_labeled(h, p);
            if (family.kind == LossKind::LinearSimplex) throw InvalidInput("linear-simplex loss needs a coin outcome");
            const double margin = p.label * dot(h, p.features);
            double scale = 0.0;  // d loss / d margin
            switch (family.kind) {
              case LossKind::Hinge:
                // Zero at the kink.
                scale = margin < 1.0 ? -1.0 : 0.0;
                break;
              case LossKind::Logistic:
                scale = -1.0 / (1.0 + std::exp(margin));
                break;
              case LossKind::SquaredHinge:
                scale = -family.squared_hinge_scale * std::max(0.0, 1.0 - margin);
                break;
              default:
                throw InvalidInput("unsupported loss family");
            }
            Vector g(h.size(), 0.0);
            if (scale != 0.0) {
              for (std::size_t i = 0; i < g.size(); ++i) g[i] = scale * p.label * p.features[i];
            }
            return g;
          },
          [&](const CoinOutcome& c) -> Vector {
            if (family.kind != LossKind::LinearSimplex) throw InvalidInput("coin outcomes need the linear-simplex loss");
            check_outcome(h, c);
            Vector g(h.size(), 0.0);
            g[c.index] = -1.0;
            return g;
          },
          [&](const NullPoint&) -> Vector { return Vector(h.size(), 0.0); },
      },
      z);
}

double dual_norm(NormKind primal, std::span<const double> v) {
  if (primal == NormKind::L2) return l2_norm(v);
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double primal_norm(NormKind primal, std::span<const double> v) {
  if (primal == NormKind::L2) return l2_norm(v);
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

Hypothesis project(const HypothesisSpace& space, std::span<const double> v) {
  if (v.size() != space.dimension()) throw InvalidInput("projection input has wrong dimension");
  Hypothesis out{Vector(v.begin(), v.end())};
  if (space.kind() == SpaceKind::L2Ball) {
    const double n = l2_norm(v);
    if (n > space.radius()) {
      const double s = space.radius() / n;
      for (double& x : out.coords) x *= s;
    }
    return out;
  }

  // Euclidean projection onto the probability simplex (sort-and-threshold).
  Vector sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) theta = t;
  }
  for (double& x : out.coords) x = std::max(0.0, x - theta);
  return out;
}

double zero_one(std::span<const double> h, const DataPoint& z) {
  return std::visit(Overloaded{
                        [&](const LabeledPoint& p) -> double {
                          check_labeled(h, p);
                          const double s = dot(h, p.features);
                          return (s == 0.0 || (s > 0.0) != (p.label > 0)) ? 1.0 : 0.0;
                        },
                        [&](const CoinOutcome& c) -> double {
                          check_outcome(h, c);
                          for (std::size_t i = 0; i < h.size(); ++i) {
                            if (i != c.index && h[i] >= h[c.index]) return 1.0;
                          }
                          return 0.0;
                        },
                        [&](const NullPoint&) -> double { return 1.0; },
                    },
                    z);
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Hinge:
      return "hinge";
    case LossKind::Logistic:
      return "logistic";
    case LossKind::SquaredHinge:
      return "squared-hinge";
    case LossKind::LinearSimplex:
      return "linear-simplex";
  }
  return "unknown";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "hinge") return LossKind::Hinge;
  if (name == "logistic") return LossKind::Logistic;
  if (name == "squared-hinge") return LossKind::SquaredHinge;
  if (name == "linear-simplex") return LossKind::LinearSimplex;
  throw InvalidConfig("unknown loss family '" + name + "'");
}

}  // namespace procure
