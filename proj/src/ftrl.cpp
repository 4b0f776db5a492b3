#include "procure/ftrl.hpp"

#include <algorithm>
#include <cmath>

namespace procure {

FtrlLearner::FtrlLearner(HypothesisSpace space, Regularizer regularizer, double eta)
    : space_(space), regularizer_(regularizer), eta_(eta), gradient_sum_(space.dimension(), 0.0) {
  const bool matches = (regularizer == Regularizer::Euclidean && space.kind() == SpaceKind::L2Ball) ||
                       (regularizer == Regularizer::NegEntropy && space.kind() == SpaceKind::Simplex);
  if (!matches) throw InvalidConfig("regularizer does not match hypothesis space");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidConfig("learning parameter eta must be positive");
  recompute();
}

FtrlLearner FtrlLearner::for_space(const HypothesisSpace& space, double eta) {
  return FtrlLearner(space, space.kind() == SpaceKind::L2Ball ? Regularizer::Euclidean : Regularizer::NegEntropy,
                     eta);
}

void FtrlLearner::feed(const WeightedFeed& f) {
  if (f.zero) return;
  if (f.gradient.size() != space_.dimension()) throw InvalidInput("gradient has wrong dimension");
  if (!std::isfinite(f.inverse_weight) || !std::isfinite(f.raw_delta)) throw NumericError("non-finite feed weight");
  for (double g : f.gradient) {
    if (!std::isfinite(g)) throw NumericError("non-finite gradient");
  }
  for (std::size_t i = 0; i < gradient_sum_.size(); ++i) gradient_sum_[i] += f.gradient[i] * f.inverse_weight;
  const double weighted_delta = f.raw_delta * f.inverse_weight;
  bound_accumulator_ += weighted_delta * weighted_delta;
  recompute();
}

void FtrlLearner::iw_feed(double q, bool obtained, std::span<const double> gradient, double delta) {
  if (!obtained) return;
  if (!(q > 0.0) || q > 1.0) throw InvalidInput("obtained arrival needs sampling probability in (0, 1]");
  feed(WeightedFeed::weighted(Vector(gradient.begin(), gradient.end()), 1.0 / q, delta));
}

double FtrlLearner::regret_bound() const { return space_.beta() / eta_ + 2.0 * eta_ * bound_accumulator_; }

void FtrlLearner::recompute() {
  const std::size_t d = space_.dimension();
  Vector v(d);
  if (regularizer_ == Regularizer::Euclidean) {
    for (std::size_t i = 0; i < d; ++i) v[i] = -eta_ * gradient_sum_[i];
    current_ = project(space_, v);
    return;
  }
  double top = -INFINITY;
  for (std::size_t i = 0; i < d; ++i) {
    v[i] = -eta_ * gradient_sum_[i];
    top = std::max(top, v[i]);
  }
  double total = 0.0;
  for (double& x : v) {
    x = std::exp(x - top);
    total += x;
  }
  for (double& x : v) x /= total;
  current_ = Hypothesis{std::move(v)};
}

}  // namespace procure
