#include "procure/mechanism.hpp"

#include <algorithm>
#include <cmath>

namespace procure {

double choose_k(const PriorKnowledge& knowledge, std::size_t rounds, double budget, PaymentMode payment,
                double c_max) {
  if (!(budget > 0.0)) throw InvalidConfig("budget must be positive");
  if (rounds < 1) throw InvalidConfig("rounds must be >= 1");
  if (!(c_max > 0.0)) throw InvalidConfig("c_max must be positive");
  for (double v : {knowledge.gamma, knowledge.gamma_max, knowledge.root_cost, knowledge.mean_cost}) {
    if (v < 0.0 || v > 1.0) throw InvalidConfig("prior knowledge values must lie in [0, 1]");
  }
  const double scale = static_cast<double>(rounds) / budget;
  const double root_max = std::sqrt(c_max);

  if (payment == PaymentMode::AtCost) {
    switch (knowledge.kind) {
      case KnowledgeKind::GammaAndMax:
      case KnowledgeKind::Gamma:
        return scale * knowledge.gamma;
      case KnowledgeKind::RootCost:
        return scale * knowledge.root_cost;
      case KnowledgeKind::MeanCost:
        return scale * std::sqrt(knowledge.mean_cost);
    }
  }
  switch (knowledge.kind) {
    case KnowledgeKind::GammaAndMax:
      return scale * std::max(0.0, 2.0 * root_max * knowledge.gamma_max - knowledge.gamma);
    case KnowledgeKind::Gamma:
      return scale * (2.0 * root_max - knowledge.gamma);
    case KnowledgeKind::RootCost:
    case KnowledgeKind::MeanCost:
      return scale * 2.0 * root_max;
  }
  throw InvalidConfig("unknown prior knowledge kind");
}

double choose_eta(double k, std::size_t rounds, double budget, double beta, double c_eta) {
  if (k < 0.0) throw InvalidConfig("K must be nonnegative");
  const double denom = std::max(std::sqrt(static_cast<double>(rounds)), k * std::sqrt(budget));
  return c_eta * std::sqrt(beta) / denom;
}

double adapt_k(double gamma_hat, std::size_t rounds, std::size_t elapsed, double budget, double spend) {
  const double left = static_cast<double>(rounds > elapsed ? rounds - elapsed : 0);
  const double remaining = std::max(budget - spend, 1e-6 * budget);
  return std::min(kMaxK, gamma_hat * left / remaining);
}

Mechanism::Mechanism(const MechanismConfig& config, const HypothesisSpace& space, const LossFamily& family)
    : config_(config),
      family_(family),
      norm_(space.norm()),
      k_(0.0),
      learner_(FtrlLearner::for_space(space, 1.0)),
      hypothesis_sum_(space.dimension(), 0.0) {
  if (config.rounds < 1) throw InvalidConfig("rounds must be >= 1");
  if (!(config.budget > 0.0)) throw InvalidConfig("budget must be positive");
  if (!(config.c_max > 0.0)) throw InvalidConfig("c_max must be positive");

  if (config.policy == PurchasePolicy::Priced) {
    if (const auto* fixed = std::get_if<FixedK>(&config.k_policy)) {
      if (fixed->k < 0.0) throw InvalidConfig("K must be nonnegative");
      k_ = fixed->k;
    } else if (const auto* known = std::get_if<KFromKnowledge>(&config.k_policy)) {
      k_ = choose_k(known->knowledge, config.rounds, config.budget, config.payment, config.c_max);
    }
  }

  double eta = 0.0;
  if (const auto* fixed = std::get_if<FixedEta>(&config.eta_policy)) {
    eta = fixed->eta;
  } else {
    eta = choose_eta(k_, config.rounds, config.budget, space.beta(), std::get<TheoryEta>(config.eta_policy).c_eta);
  }
  learner_ = FtrlLearner::for_space(space, eta);
  transcript_.reserve(config.rounds);
}

const RoundRecord& Mechanism::step(const Arrival& arrival, double u) {
  if (elapsed() >= config_.rounds) throw SequenceOverflow("all rounds have already been played");

  const Hypothesis& h = learner_.post();
  RoundRecord rec;
  rec.t = elapsed();
  rec.cost = arrival.cost;
  rec.loss = eval_loss(family_, h.coords, arrival.data);
  const Vector gradient = eval_gradient(family_, h.coords, arrival.data);
  rec.delta = dual_norm(norm_, gradient);

  for (std::size_t i = 0; i < hypothesis_sum_.size(); ++i) hypothesis_sum_[i] += h[i];
  if (config_.record_hypotheses) posted_.push_back(h);

  const auto pay = [&](double price) { return config_.payment == PaymentMode::PostedPrice ? price : arrival.cost; };

  switch (config_.policy) {
    case PurchasePolicy::Baseline:
      // Unlimited: takes everything for free.
      rec.offered = true;
      rec.price = arrival.cost;
      rec.accepted = true;
      rec.q = 1.0;
      break;
    case PurchasePolicy::Naive:
      if (spend_ + config_.c_max <= config_.budget) {
        rec.offered = true;
        rec.price = config_.c_max;
        rec.accepted = rec.price >= arrival.cost;
        rec.q = 1.0;
        if (rec.accepted) rec.payment = pay(rec.price);
      }
      break;
    case PurchasePolicy::Priced: {
      const bool stopped = config_.hard_stop && spend_ >= config_.budget;
      if (stopped || rec.delta <= 0.0) break;
      const PricingQuote quote{rec.delta, k_, config_.c_max};
      rec.offered = true;
      rec.price = k_ > 0.0 ? sample_price(quote, u) : config_.c_max;
      rec.accepted = rec.price >= arrival.cost;
      rec.q = survival(quote, arrival.cost);
      if (rec.accepted) {
        rec.payment = pay(rec.price);
        gamma_sum_ += rec.delta * std::sqrt(arrival.cost) / rec.q;
      }
      break;
    }
  }

  if (rec.accepted && rec.delta > 0.0) learner_.iw_feed(rec.q, true, gradient, rec.delta);
  if (rec.accepted) ++purchases_;
  spend_ += rec.payment;
  rec.cumulative_spend = spend_;
  transcript_.push_back(rec);

  if (config_.policy == PurchasePolicy::Priced && std::holds_alternative<AdaptiveK>(config_.k_policy)) {
    k_ = adapt_k(gamma_estimate(), config_.rounds, elapsed(), config_.budget, spend_);
  }
  return transcript_.back();
}

double Mechanism::gamma_estimate() const {
  if (transcript_.empty()) return 0.0;
  return std::clamp(gamma_sum_ / static_cast<double>(transcript_.size()), 0.0, 1.0);
}

Hypothesis Mechanism::finalize() const {
  if (elapsed() < config_.rounds) throw IncompleteRun("finalize called before all rounds were played");
  Vector mean(hypothesis_sum_);
  for (double& v : mean) v /= static_cast<double>(config_.rounds);
  return project(learner_.space(), mean);
}

std::string to_string(PaymentMode mode) { return mode == PaymentMode::PostedPrice ? "posted-price" : "at-cost"; }

std::string to_string(PurchasePolicy policy) {
  switch (policy) {
    case PurchasePolicy::Priced:
      return "priced";
    case PurchasePolicy::Naive:
      return "naive";
    case PurchasePolicy::Baseline:
      return "baseline";
  }
  return "unknown";
}

PaymentMode payment_mode_from_string(const std::string& name) {
  if (name == "posted-price") return PaymentMode::PostedPrice;
  if (name == "at-cost") return PaymentMode::AtCost;
  throw InvalidConfig("unknown payment mode '" + name + "'");
}

PurchasePolicy purchase_policy_from_string(const std::string& name) {
  if (name == "priced") return PurchasePolicy::Priced;
  if (name == "naive") return PurchasePolicy::Naive;
  if (name == "baseline") return PurchasePolicy::Baseline;
  throw InvalidConfig("unknown purchase policy '" + name + "'");
}

KnowledgeKind knowledge_kind_from_string(const std::string& name) {
  if (name == "gamma-and-max") return KnowledgeKind::GammaAndMax;
  if (name == "gamma") return KnowledgeKind::Gamma;
  if (name == "root-cost") return KnowledgeKind::RootCost;
  if (name == "mean-cost") return KnowledgeKind::MeanCost;
  throw InvalidConfig("unknown knowledge kind '" + name + "'");
}

}  // namespace procure
