#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "procure/environment.hpp"
#include "procure/mechanism.hpp"
#include "procure/metrics.hpp"

namespace procure {

enum class InstanceKind { Coin, Gamma, Linear, Idx };
enum class BiasChoice { Heads, Tails, Random };
enum class EtaChoice { Theory, Fixed, FeatureNorm };
enum class KChoice { Adaptive, Fixed, Knowledge };

/// Flat experiment configuration; every field has a default. See README for
/// the JSON keys.
struct ExperimentConfig {
  // instance
  InstanceKind instance = InstanceKind::Coin;
  std::size_t rounds = 1000;
  double epsilon = 0.1;
  bool epsilon_from_budget = false;  // eps = 1 / sqrt(B)
  BiasChoice bias = BiasChoice::Heads;
  double gamma = 0.3;
  std::size_t test_size = 1000;
  std::size_t dimension = 10;
  std::size_t clusters = 2;
  double separation = 1.0;
  double noise = 0.5;
  double radius = 10.0;
  LossKind loss = LossKind::Hinge;
  std::string cost_model = "uniform";
  double cost = 0.5;
  double cost_lo = 0.0;
  double cost_hi = 1.0;
  double p_high = 0.2;
  double high_cost = 1.0;
  std::vector<int> target_groups;  // empty = hardest clusters (synthetic) or {4, 9} (IDX)
  std::string idx_images;
  std::string idx_labels;
  std::vector<int> positive_digits{9, 8};
  std::vector<int> negative_digits{1, 4};
  std::size_t idx_limit = 0;
  double train_fraction = 0.5;

  // mechanism
  double budget = 100.0;
  PaymentMode payment = PaymentMode::PostedPrice;
  PurchasePolicy policy = PurchasePolicy::Priced;
  KChoice k_policy = KChoice::Adaptive;
  double k = 0.0;
  KnowledgeKind knowledge = KnowledgeKind::GammaAndMax;
  double known_gamma = 0.0;
  double known_gamma_max = 0.0;
  double known_root_cost = 0.0;
  double known_mean_cost = 0.0;
  EtaChoice eta_policy = EtaChoice::Theory;
  double eta = 0.1;
  double c_eta = 1.0;
  bool hard_stop = false;
  double c_max = 1.0;

  // harness
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::vector<double> budget_grid;
  std::vector<PurchasePolicy> policies{PurchasePolicy::Priced, PurchasePolicy::Naive, PurchasePolicy::Baseline};
  std::size_t oracle_iterations = 5000;
  bool compute_regret = true;  // false skips the offline oracle (regret and gamma_star become NaN)
  bool per_round_risk = false;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Builds problem instances for a config; IDX files are read once.
class InstanceFactory {
 public:
  explicit InstanceFactory(const ExperimentConfig& config);
  ProblemInstance make(std::uint64_t seed, double budget) const;

 private:
  ExperimentConfig config_;
  std::shared_ptr<const Dataset> idx_data_;
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  PurchasePolicy policy = PurchasePolicy::Priced;
  double budget = 0.0;
  double spend = 0.0;
  std::size_t purchases = 0;
  double regret = 0.0;
  double regret_bound = 0.0;  // pathwise beta/eta + 2 eta sum (delta/q)^2
  double risk_surrogate = 0.0;
  double risk_zero_one = 0.0;
  double mean_round_risk = 0.0;  // mean surrogate risk of the posted hypotheses (if requested)
  SequenceStats stats;
  double eta = 0.0;
  double final_k = 0.0;
  bool oracle_converged = true;
  double wall_time = 0.0;
  std::vector<RoundRecord> transcript;  // kept only when requested
};

/// Per-trial seed: SplitMix64 of (seed + trial index).
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

MechanismConfig mechanism_config(const ExperimentConfig& config, const ProblemInstance& instance,
                                 PurchasePolicy policy, double budget);

TrialResult run_trial(const ExperimentConfig& config, const InstanceFactory& factory, PurchasePolicy policy,
                      double budget, std::size_t trial, bool keep_transcript);

/// Runs trials 0..trials-1 on `jobs` worker threads; results in trial order.
std::vector<TrialResult> run_trials(const ExperimentConfig& config, const InstanceFactory& factory,
                                    PurchasePolicy policy, double budget, std::size_t jobs,
                                    bool keep_first_transcript = false);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& values);

std::string format_number(double v);
void write_transcript_csv(std::ostream& out, const std::vector<RoundRecord>& transcript);
void write_summary_csv(std::ostream& out, const std::vector<TrialResult>& results);

struct SweepRow {
  PurchasePolicy policy = PurchasePolicy::Priced;
  double budget = 0.0;
  std::size_t trials = 0;
  MeanSe risk_surrogate, risk_zero_one, regret, spend, gamma;
};
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// `run`: writes transcript.csv (trial 0) and summary.csv to the output dir
/// and prints mean +- standard error to `log`.
std::vector<TrialResult> cmd_run(const ExperimentConfig& config, std::size_t jobs, std::ostream& log);

/// `sweep`: one row per (policy, budget) on paired instance seeds; writes sweep.csv.
std::vector<SweepRow> cmd_sweep(const ExperimentConfig& config, std::size_t jobs, std::ostream& log);

/// `oracle`: best hypothesis in hindsight for trial 0's instance and the
/// sequence statistics evaluated at it.
nlohmann::json cmd_oracle(const ExperimentConfig& config);

struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyOptions {
  bool quick = false;
  std::uint64_t seed = 20240601;
  /// Price sampler under test; tests inject faulty ones.
  std::function<double(const PricingQuote&, double)> sampler = sample_price;
};

/// Monte-Carlo invariant suite for the pricing and FTRL modules.
std::vector<CheckResult> cmd_verify(const VerifyOptions& options);
nlohmann::json verify_report_json(const std::vector<CheckResult>& checks);

}  // namespace procure
