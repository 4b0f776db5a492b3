#pragma once

#include <span>

#include "procure/core.hpp"

namespace procure {

enum class Regularizer { Euclidean, NegEntropy };

/// One input to the learner: either the zero function or a linearized loss
/// with its importance weight 1/q.
struct WeightedFeed {
  bool zero = true;
  Vector gradient;
  double inverse_weight = 1.0;
  double raw_delta = 0.0;

  static WeightedFeed zero_function() { return {}; }
  static WeightedFeed weighted(Vector gradient, double inverse_weight, double raw_delta) {
    return {false, std::move(gradient), inverse_weight, raw_delta};
  }
};

/// Linearized Follow-the-Regularized-Leader.
///
/// The posted hypothesis is argmin_h { <S, h> + G(h) / eta } where S is the
/// sum of fed (importance-weighted) gradients. With G = ||h||^2/2 on an l2
/// ball this is lazy-projected gradient descent, Pi(-eta S); with negative
/// entropy on the simplex it is softmax(-eta S).
///
/// The learner also accumulates sum (delta * 1/q)^2 over fed functions so the
/// pathwise bound beta/eta + 2 eta sum Delta^2 of the functions it actually
/// saw can be queried at any time.
class FtrlLearner {
 public:
  FtrlLearner(HypothesisSpace space, Regularizer regularizer, double eta);

  /// Picks the regularizer that matches the space.
  static FtrlLearner for_space(const HypothesisSpace& space, double eta);

  const Hypothesis& post() const { return current_; }

  void feed(const WeightedFeed& f);

  /// Importance-weighted feeding: the gradient scaled by 1/q when obtained,
  /// the zero function otherwise.
  void iw_feed(double q, bool obtained, std::span<const double> gradient, double delta);

  double regret_bound() const;

  const HypothesisSpace& space() const { return space_; }
  Regularizer regularizer() const { return regularizer_; }
  double eta() const { return eta_; }
  const Vector& gradient_sum() const { return gradient_sum_; }
  double bound_accumulator() const { return bound_accumulator_; }

 private:
  void recompute();

  HypothesisSpace space_;
  Regularizer regularizer_;
  double eta_;
  Vector gradient_sum_;
  Hypothesis current_;
  double bound_accumulator_ = 0.0;
};

}  // namespace procure
