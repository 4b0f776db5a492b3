#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "procure/core.hpp"
#include "procure/ftrl.hpp"
#include "procure/pricing.hpp"

namespace procure {

enum class PaymentMode { PostedPrice, AtCost };
enum class PurchasePolicy { Priced, Naive, Baseline };

/// Which statistic of the cost/data sequence the mechanism knows in advance.
enum class KnowledgeKind {
  GammaAndMax,  // gamma and gamma^max
  Gamma,
  RootCost,  // c-bar = mean sqrt(c_t)
  MeanCost,  // mu = mean c_t
};

struct PriorKnowledge {
  KnowledgeKind kind = KnowledgeKind::GammaAndMax;
  double gamma = 0.0;
  double gamma_max = 0.0;
  double root_cost = 0.0;
  double mean_cost = 0.0;
};

struct FixedK {
  double k = 0.0;
};
struct KFromKnowledge {
  PriorKnowledge knowledge;
};
/// K starts at 0 and follows gamma-hat * rounds-left / budget-left.
struct AdaptiveK {};
using KPolicy = std::variant<FixedK, KFromKnowledge, AdaptiveK>;

struct FixedEta {
  double eta = 0.1;
};
/// eta = c_eta sqrt(beta) / max{sqrt(T), K sqrt(B)}.
struct TheoryEta {
  double c_eta = 1.0;
};
using EtaPolicy = std::variant<FixedEta, TheoryEta>;

struct MechanismConfig {
  std::size_t rounds = 1;
  double budget = 1.0;
  PaymentMode payment = PaymentMode::PostedPrice;
  PurchasePolicy policy = PurchasePolicy::Priced;
  KPolicy k_policy = AdaptiveK{};
  EtaPolicy eta_policy = TheoryEta{};
  bool hard_stop = false;
  double c_max = 1.0;
  /// Keep every posted hypothesis (needed for per-round risk audits).
  bool record_hypotheses = false;
};

/// One row of the audit transcript.
///
/// `offered` is false when the mechanism withholds an offer (zero data
/// value, naive budget exhausted, or hard stop); such rows carry price 0,
/// are never accepted and pay nothing. On offered rows accepted <=> price >= cost.
struct RoundRecord {
  std::size_t t = 0;
  double delta = 0.0;
  double cost = 0.0;
  double price = 0.0;
  bool offered = false;
  bool accepted = false;
  double q = 0.0;
  double payment = 0.0;
  double loss = 0.0;
  double cumulative_spend = 0.0;
};

/// Normalization constant for the price law from prior knowledge.
///
/// At-cost: K = T x / B with x = gamma, c-bar or sqrt(mu).
/// Posted-price: K = (T/B)(2 sqrt(c_max) gamma^max - gamma) when both are
/// known; otherwise gamma^max is bounded by 1 (K = (T/B)(2 sqrt(c_max) - gamma))
/// and, without gamma, gamma is bounded below by 0 (K = 2 T sqrt(c_max) / B).
double choose_k(const PriorKnowledge& knowledge, std::size_t rounds, double budget, PaymentMode payment,
                double c_max = 1.0);

double choose_eta(double k, std::size_t rounds, double budget, double beta, double c_eta = 1.0);

/// Burn-rate update: gamma-hat * (T - t) / max{B - spend, 1e-6 B}, capped at 1e6.
double adapt_k(double gamma_hat, std::size_t rounds, std::size_t elapsed, double budget, double spend);

inline constexpr double kMaxK = 1e6;

/// Mechanism 1 (posted-price or at-cost rounds over the learner) with the
/// averaging of Mechanism 2 available through `finalize`, plus the naive
/// and unlimited-baseline comparison policies.
class Mechanism {
 public:
  Mechanism(const MechanismConfig& config, const HypothesisSpace& space, const LossFamily& family);

  /// Runs one round; `u` is the uniform draw for the price law.
  const RoundRecord& step(const Arrival& arrival, double u);

  /// Average of the posted hypotheses. Requires all rounds to have run.
  Hypothesis finalize() const;

  /// Importance-weighted running estimate of mean(delta sqrt(c)), in [0, 1].
  double gamma_estimate() const;

  const MechanismConfig& config() const { return config_; }
  const FtrlLearner& learner() const { return learner_; }
  const std::vector<RoundRecord>& transcript() const { return transcript_; }
  const std::vector<Hypothesis>& posted_hypotheses() const { return posted_; }
  std::size_t elapsed() const { return transcript_.size(); }
  double spend() const { return spend_; }
  std::size_t purchases() const { return purchases_; }
  double current_k() const { return k_; }
  double eta() const { return learner_.eta(); }
  const Vector& hypothesis_sum() const { return hypothesis_sum_; }

 private:
  MechanismConfig config_;
  LossFamily family_;
  NormKind norm_;
  double k_;
  FtrlLearner learner_;
  double spend_ = 0.0;
  std::size_t purchases_ = 0;
  double gamma_sum_ = 0.0;
  Vector hypothesis_sum_;
  std::vector<RoundRecord> transcript_;
  std::vector<Hypothesis> posted_;
};

std::string to_string(PaymentMode mode);
std::string to_string(PurchasePolicy policy);
PaymentMode payment_mode_from_string(const std::string& name);
PurchasePolicy purchase_policy_from_string(const std::string& name);
KnowledgeKind knowledge_kind_from_string(const std::string& name);

}  // namespace procure
