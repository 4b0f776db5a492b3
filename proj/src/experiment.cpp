#include "procure/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "procure/random.hpp"

namespace procure {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "instance",        "rounds",          "epsilon",         "epsilon_from_budget", "bias",
      "gamma",           "test_size",       "dimension",       "clusters",            "separation",
      "noise",           "radius",          "loss",            "cost_model",          "cost",
      "cost_lo",         "cost_hi",         "p_high",          "high_cost",           "target_groups",
      "idx_images",      "idx_labels",      "positive_digits", "negative_digits",     "idx_limit",
      "train_fraction",  "budget",          "payment",         "policy",              "k_policy",
      "k",               "knowledge",       "known_gamma",     "known_gamma_max",     "known_root_cost",
      "known_mean_cost", "eta_policy",      "eta",             "c_eta",               "hard_stop",
      "c_max",           "trials",          "seed",            "output_dir",          "budget_grid",
      "policies",        "oracle_iterations", "per_round_risk",      "compute_regret"};
  return keys;
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("config key '") + key + "': " + e.what());
  }
}

InstanceKind instance_from_string(const std::string& s) {
  if (s == "coin") return InstanceKind::Coin;
  if (s == "gamma") return InstanceKind::Gamma;
  if (s == "linear") return InstanceKind::Linear;
  if (s == "idx") return InstanceKind::Idx;
  throw InvalidConfig("unknown instance kind '" + s + "'");
}

std::string to_string(InstanceKind k) {
  switch (k) {
    case InstanceKind::Coin:
      return "coin";
    case InstanceKind::Gamma:
      return "gamma";
    case InstanceKind::Linear:
      return "linear";
    case InstanceKind::Idx:
      return "idx";
  }
  return "coin";
}

BiasChoice bias_from_string(const std::string& s) {
  if (s == "heads") return BiasChoice::Heads;
  if (s == "tails") return BiasChoice::Tails;
  if (s == "random") return BiasChoice::Random;
  throw InvalidConfig("unknown bias '" + s + "'");
}

std::string to_string(BiasChoice b) {
  return b == BiasChoice::Heads ? "heads" : b == BiasChoice::Tails ? "tails" : "random";
}

EtaChoice eta_from_string(const std::string& s) {
  if (s == "theory") return EtaChoice::Theory;
  if (s == "fixed") return EtaChoice::Fixed;
  if (s == "feature-norm") return EtaChoice::FeatureNorm;
  throw InvalidConfig("unknown eta policy '" + s + "'");
}

std::string to_string(EtaChoice e) {
  return e == EtaChoice::Theory ? "theory" : e == EtaChoice::Fixed ? "fixed" : "feature-norm";
}

KChoice k_from_string(const std::string& s) {
  if (s == "adaptive") return KChoice::Adaptive;
  if (s == "fixed") return KChoice::Fixed;
  if (s == "knowledge") return KChoice::Knowledge;
  throw InvalidConfig("unknown k policy '" + s + "'");
}

std::string to_string(KChoice k) {
  return k == KChoice::Adaptive ? "adaptive" : k == KChoice::Fixed ? "fixed" : "knowledge";
}

std::string to_string(KnowledgeKind k) {
  switch (k) {
    case KnowledgeKind::GammaAndMax:
      return "gamma-and-max";
    case KnowledgeKind::Gamma:
      return "gamma";
    case KnowledgeKind::RootCost:
      return "root-cost";
    case KnowledgeKind::MeanCost:
      return "mean-cost";
  }
  return "gamma-and-max";
}

CostModel cost_model_for(const ExperimentConfig& c, std::vector<int> default_targets) {
  if (c.cost_model == "constant") return ConstantCost{c.cost};
  if (c.cost_model == "uniform") return UniformCost{c.cost_lo, c.cost_hi};
  if (c.cost_model == "two-point-independent") return TwoPointIndependentCost{c.p_high, c.high_cost};
  if (c.cost_model == "two-point-correlated") {
    return TwoPointCorrelatedCost{c.p_high, c.high_cost, c.target_groups.empty() ? default_targets : c.target_groups};
  }
  throw InvalidConfig("unknown cost model '" + c.cost_model + "'");
}

void validate(const ExperimentConfig& c) {
  if (c.trials < 1) throw InvalidConfig("trials must be >= 1");
  if (c.rounds < 1) throw InvalidConfig("rounds must be >= 1");
  if (!(c.budget > 0.0)) throw InvalidConfig("budget must be positive");
  if (!(c.c_max > 0.0)) throw InvalidConfig("c_max must be positive");
  for (double b : c.budget_grid) {
    if (!(b > 0.0)) throw InvalidConfig("budget grid values must be positive");
  }
  if (c.instance == InstanceKind::Idx && (c.idx_images.empty() || c.idx_labels.empty())) {
    throw InvalidConfig("idx instance needs idx_images and idx_labels");
  }
  if (c.policies.empty()) throw InvalidConfig("policies must not be empty");
}

double mean_feature_norm(const std::vector<Arrival>& arrivals) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& a : arrivals) {
    if (const auto* p = std::get_if<LabeledPoint>(&a.data)) {
      total += l2_norm(p->features);
      ++n;
    }
  }
  return n == 0 ? 1.0 : total / static_cast<double>(n);
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().count(key)) throw InvalidConfig("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  std::string s;
  if (j.contains("instance")) c.instance = instance_from_string(j.at("instance").get<std::string>());
  read(j, "rounds", c.rounds);
  read(j, "epsilon", c.epsilon);
  read(j, "epsilon_from_budget", c.epsilon_from_budget);
  if (j.contains("bias")) c.bias = bias_from_string(j.at("bias").get<std::string>());
  read(j, "gamma", c.gamma);
  read(j, "test_size", c.test_size);
  read(j, "dimension", c.dimension);
  read(j, "clusters", c.clusters);
  read(j, "separation", c.separation);
  read(j, "noise", c.noise);
  read(j, "radius", c.radius);
  if (j.contains("loss")) c.loss = loss_kind_from_string(j.at("loss").get<std::string>());
  read(j, "cost_model", c.cost_model);
  read(j, "cost", c.cost);
  read(j, "cost_lo", c.cost_lo);
  read(j, "cost_hi", c.cost_hi);
  read(j, "p_high", c.p_high);
  read(j, "high_cost", c.high_cost);
  read(j, "target_groups", c.target_groups);
  read(j, "idx_images", c.idx_images);
  read(j, "idx_labels", c.idx_labels);
  read(j, "positive_digits", c.positive_digits);
  read(j, "negative_digits", c.negative_digits);
  read(j, "idx_limit", c.idx_limit);
  read(j, "train_fraction", c.train_fraction);
  read(j, "budget", c.budget);
  if (j.contains("payment")) c.payment = payment_mode_from_string(j.at("payment").get<std::string>());
  if (j.contains("policy")) c.policy = purchase_policy_from_string(j.at("policy").get<std::string>());
  if (j.contains("k_policy")) c.k_policy = k_from_string(j.at("k_policy").get<std::string>());
  read(j, "k", c.k);
  if (j.contains("knowledge")) c.knowledge = knowledge_kind_from_string(j.at("knowledge").get<std::string>());
  read(j, "known_gamma", c.known_gamma);
  read(j, "known_gamma_max", c.known_gamma_max);
  read(j, "known_root_cost", c.known_root_cost);
  read(j, "known_mean_cost", c.known_mean_cost);
  if (j.contains("eta_policy")) c.eta_policy = eta_from_string(j.at("eta_policy").get<std::string>());
  read(j, "eta", c.eta);
  read(j, "c_eta", c.c_eta);
  read(j, "hard_stop", c.hard_stop);
  read(j, "c_max", c.c_max);
  read(j, "trials", c.trials);
  read(j, "seed", c.seed);
  read(j, "output_dir", c.output_dir);
  read(j, "budget_grid", c.budget_grid);
  if (j.contains("policies")) {
    c.policies.clear();
    for (const auto& p : j.at("policies")) c.policies.push_back(purchase_policy_from_string(p.get<std::string>()));
  }
  read(j, "oracle_iterations", c.oracle_iterations);
  read(j, "per_round_risk", c.per_round_risk);
  read(j, "compute_regret", c.compute_regret);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidConfig("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  json policies = json::array();
  for (auto p : c.policies) policies.push_back(to_string(p));
  return json{{"instance", to_string(c.instance)},
              {"rounds", c.rounds},
              {"epsilon", c.epsilon},
              {"epsilon_from_budget", c.epsilon_from_budget},
              {"bias", to_string(c.bias)},
              {"gamma", c.gamma},
              {"test_size", c.test_size},
              {"dimension", c.dimension},
              {"clusters", c.clusters},
              {"separation", c.separation},
              {"noise", c.noise},
              {"radius", c.radius},
              {"loss", to_string(c.loss)},
              {"cost_model", c.cost_model},
              {"cost", c.cost},
              {"cost_lo", c.cost_lo},
              {"cost_hi", c.cost_hi},
              {"p_high", c.p_high},
              {"high_cost", c.high_cost},
              {"target_groups", c.target_groups},
              {"idx_images", c.idx_images},
              {"idx_labels", c.idx_labels},
              {"positive_digits", c.positive_digits},
              {"negative_digits", c.negative_digits},
              {"idx_limit", c.idx_limit},
              {"train_fraction", c.train_fraction},
              {"budget", c.budget},
              {"payment", to_string(c.payment)},
              {"policy", to_string(c.policy)},
              {"k_policy", to_string(c.k_policy)},
              {"k", c.k},
              {"knowledge", to_string(c.knowledge)},
              {"known_gamma", c.known_gamma},
              {"known_gamma_max", c.known_gamma_max},
              {"known_root_cost", c.known_root_cost},
              {"known_mean_cost", c.known_mean_cost},
              {"eta_policy", to_string(c.eta_policy)},
              {"eta", c.eta},
              {"c_eta", c.c_eta},
              {"hard_stop", c.hard_stop},
              {"c_max", c.c_max},
              {"trials", c.trials},
              {"seed", c.seed},
              {"output_dir", c.output_dir},
              {"budget_grid", c.budget_grid},
              {"policies", policies},
              {"oracle_iterations", c.oracle_iterations},
              {"per_round_risk", c.per_round_risk},
              {"compute_regret", c.compute_regret}};
}

InstanceFactory::InstanceFactory(const ExperimentConfig& config) : config_(config) {
  if (config.instance == InstanceKind::Idx) {
    idx_data_ = std::make_shared<const Dataset>(load_idx(config.idx_images, config.idx_labels,
                                                         config.positive_digits, config.negative_digits,
                                                         config.idx_limit));
  }
}

ProblemInstance InstanceFactory::make(std::uint64_t seed, double budget) const {
  const ExperimentConfig& c = config_;
  CoinBias bias = c.bias == BiasChoice::Tails ? CoinBias::Tails : CoinBias::Heads;
  if (c.bias == BiasChoice::Random) {
    Rng rng(derive_seed(seed, 7));
    bias = uniform01(rng) < 0.5 ? CoinBias::Heads : CoinBias::Tails;
  }
  const double eps = c.epsilon_from_budget ? 1.0 / std::sqrt(budget) : c.epsilon;

  switch (c.instance) {
    case InstanceKind::Coin:
      return gen_coin_sequence(c.rounds, eps, bias, seed, c.test_size);
    case InstanceKind::Gamma:
      return gen_gamma_sequence(c.rounds, c.gamma, eps, bias, seed, c.test_size);
    case InstanceKind::Linear: {
      LinearTaskParams p;
      p.dimension = c.dimension;
      p.clusters = c.clusters;
      p.separation = c.separation;
      p.noise = c.noise;
      p.rounds = c.rounds;
      p.test_size = c.test_size;
      p.radius = c.radius;
      p.family = c.loss == LossKind::SquaredHinge ? LossFamily::squared_hinge(c.radius) : LossFamily{c.loss, 1.0};
      return gen_linear_task(p, cost_model_for(c, hardest_groups(c.clusters)), seed);
    }
    case InstanceKind::Idx: {
      auto [train, test] = split_dataset(*idx_data_, c.train_fraction, derive_seed(seed, 0));
      if (train.size() == 0) throw InvalidConfig("IDX filter left no training data");
      const auto d = std::get<LabeledPoint>(train.points.front()).features.size();
      ProblemInstance inst{{},
                           std::move(test.points),
                           HypothesisSpace::l2_ball(d, c.radius),
                           c.loss == LossKind::SquaredHinge ? LossFamily::squared_hinge(c.radius)
                                                            : LossFamily{c.loss, 1.0},
                           train.groups,
                           {}};
      inst.arrivals = attach_costs(train, cost_model_for(c, {4, 9}), derive_seed(seed, 1));
      inst.truth = {{"train_size", static_cast<double>(train.size())},
                    {"test_size", static_cast<double>(inst.test_set.size())}};
      return inst;
    }
  }
  throw InvalidConfig("unknown instance kind");
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) { return splitmix64(seed + trial); }

MechanismConfig mechanism_config(const ExperimentConfig& c, const ProblemInstance& instance, PurchasePolicy policy,
                                 double budget) {
  MechanismConfig m;
  m.rounds = instance.arrivals.size();
  m.budget = budget;
  m.payment = c.payment;
  m.policy = policy;
  switch (c.k_policy) {
    case KChoice::Adaptive:
      m.k_policy = AdaptiveK{};
      break;
    case KChoice::Fixed:
      m.k_policy = FixedK{c.k};
      break;
    case KChoice::Knowledge:
      m.k_policy =
          KFromKnowledge{{c.knowledge, c.known_gamma, c.known_gamma_max, c.known_root_cost, c.known_mean_cost}};
      break;
  }
  switch (c.eta_policy) {
    case EtaChoice::Theory:
      m.eta_policy = TheoryEta{c.c_eta};
      break;
    case EtaChoice::Fixed:
      m.eta_policy = FixedEta{c.eta};
      break;
    case EtaChoice::FeatureNorm:
      m.eta_policy = FixedEta{0.1 / mean_feature_norm(instance.arrivals)};
      break;
  }
  m.hard_stop = c.hard_stop;
  m.c_max = c.c_max;
  m.record_hypotheses = c.per_round_risk;
  return m;
}

TrialResult run_trial(const ExperimentConfig& config, const InstanceFactory& factory, PurchasePolicy policy,
                      double budget, std::size_t trial, bool keep_transcript) {
  const auto started = std::chrono::steady_clock::now();
  TrialResult r;
  r.trial = trial;
  r.seed = trial_seed(config.seed, trial);
  r.policy = policy;
  r.budget = budget;

  const ProblemInstance inst = factory.make(derive_seed(r.seed, 1), budget);
  Mechanism mech(mechanism_config(config, inst, policy, budget), inst.space, inst.family);
  Rng prices(derive_seed(r.seed, 2));
  for (const auto& a : inst.arrivals) mech.step(a, uniform01(prices));

  const Hypothesis averaged = mech.finalize();
  r.spend = mech.spend();
  r.purchases = mech.purchases();
  r.regret_bound = mech.learner().regret_bound();
  r.eta = mech.eta();
  r.final_k = mech.current_k();
  if (config.compute_regret) {
    const OfflineOptimum opt = offline_best(inst.arrivals, inst.space, inst.family, config.oracle_iterations);
    r.regret = regret(mech.transcript(), inst.arrivals, inst.family, opt.hypothesis.coords);
    r.oracle_converged = opt.converged;
    r.stats = sequence_stats(inst.arrivals, mech.transcript(), opt.hypothesis.coords, inst.family, inst.space.norm());
  } else {
    const Vector origin(inst.space.dimension(), 0.0);
    r.stats = sequence_stats(inst.arrivals, mech.transcript(), origin, inst.family, inst.space.norm());
    r.regret = r.stats.gamma_star = std::nan("");
  }
  if (!inst.test_set.empty()) {
    r.risk_surrogate = risk(averaged.coords, inst.test_set, inst.family, RiskMetric::Surrogate);
    r.risk_zero_one = risk(averaged.coords, inst.test_set, inst.family, RiskMetric::ZeroOne);
    if (config.per_round_risk) {
      double total = 0.0;
      for (const auto& h : mech.posted_hypotheses()) {
        total += risk(h.coords, inst.test_set, inst.family, RiskMetric::Surrogate);
      }
      r.mean_round_risk = total / static_cast<double>(mech.posted_hypotheses().size());
    }
  } else {
    r.risk_surrogate = r.risk_zero_one = r.mean_round_risk = std::nan("");
  }
  if (keep_transcript) r.transcript = mech.transcript();
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

std::vector<TrialResult> run_trials(const ExperimentConfig& config, const InstanceFactory& factory,
                                    PurchasePolicy policy, double budget, std::size_t jobs,
                                    bool keep_first_transcript) {
  std::vector<TrialResult> results(config.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < config.trials; i = next++) {
      try {
        results[i] = run_trial(config, factory, policy, budget, i, keep_first_transcript && i == 0);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, config.trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_transcript_csv(std::ostream& out, const std::vector<RoundRecord>& transcript) {
  out << "t,delta,cost,price,accepted,q,payment,loss,cum_spend\n";
  for (const auto& r : transcript) {
    out << r.t << ',' << format_number(r.delta) << ',' << format_number(r.cost) << ',' << format_number(r.price)
        << ',' << (r.accepted ? 1 : 0) << ',' << format_number(r.q) << ',' << format_number(r.payment) << ','
        << format_number(r.loss) << ',' << format_number(r.cumulative_spend) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<TrialResult>& results) {
  out << "trial,seed,policy,budget,spend,purchases,regret,risk_surrogate,risk_zero_one,gamma,gamma_max,c_bar,mu,"
         "gamma_star\n";
  for (const auto& r : results) {
    out << r.trial << ',' << r.seed << ',' << to_string(r.policy) << ',' << format_number(r.budget) << ','
        << format_number(r.spend) << ',' << r.purchases << ',' << format_number(r.regret) << ','
        << format_number(r.risk_surrogate) << ',' << format_number(r.risk_zero_one) << ','
        << format_number(r.stats.gamma) << ',' << format_number(r.stats.gamma_max) << ','
        << format_number(r.stats.root_cost) << ',' << format_number(r.stats.mean_cost) << ','
        << format_number(r.stats.gamma_star) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "policy,budget,trials,mean_risk_surrogate,se_risk_surrogate,mean_risk_zero_one,se_risk_zero_one,"
         "mean_regret,se_regret,mean_spend,se_spend,mean_gamma,se_gamma\n";
  for (const auto& r : rows) {
    out << to_string(r.policy) << ',' << format_number(r.budget) << ',' << r.trials << ','
        << format_number(r.risk_surrogate.mean) << ',' << format_number(r.risk_surrogate.se) << ','
        << format_number(r.risk_zero_one.mean) << ',' << format_number(r.risk_zero_one.se) << ','
        << format_number(r.regret.mean) << ',' << format_number(r.regret.se) << ',' << format_number(r.spend.mean)
        << ',' << format_number(r.spend.se) << ',' << format_number(r.gamma.mean) << ','
        << format_number(r.gamma.se) << '\n';
  }
}

namespace {

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw InvalidConfig("cannot write to output directory " + dir.string());
  return out;
}

SweepRow summarize(PurchasePolicy policy, double budget, const std::vector<TrialResult>& results) {
  std::vector<double> rs, rz, rg, sp, gm;
  for (const auto& r : results) {
    rs.push_back(r.risk_surrogate);
    rz.push_back(r.risk_zero_one);
    rg.push_back(r.regret);
    sp.push_back(r.spend);
    gm.push_back(r.stats.gamma);
  }
  return SweepRow{policy, budget, results.size(), mean_se(rs), mean_se(rz), mean_se(rg), mean_se(sp), mean_se(gm)};
}

void print_mean_se(std::ostream& log, const char* name, const MeanSe& m) {
  log << "  " << name << ": " << format_number(m.mean) << " +- " << format_number(m.se) << '\n';
}

}  // namespace

std::vector<TrialResult> cmd_run(const ExperimentConfig& config, std::size_t jobs, std::ostream& log) {
  validate(config);
  // Open outputs before the (possibly long) run so a bad directory fails fast.
  auto transcript_out = open_output(config.output_dir, "transcript.csv");
  auto summary_out = open_output(config.output_dir, "summary.csv");
  const InstanceFactory factory(config);
  auto results = run_trials(config, factory, config.policy, config.budget, jobs, true);
  write_transcript_csv(transcript_out, results.front().transcript);
  write_summary_csv(summary_out, results);

  const SweepRow s = summarize(config.policy, config.budget, results);
  log << to_string(config.policy) << " policy, budget " << format_number(config.budget) << ", " << results.size()
      << " trial(s)\n";
  print_mean_se(log, "regret", s.regret);
  print_mean_se(log, "risk (surrogate)", s.risk_surrogate);
  print_mean_se(log, "risk (zero-one)", s.risk_zero_one);
  print_mean_se(log, "spend", s.spend);
  return results;
}

std::vector<SweepRow> cmd_sweep(const ExperimentConfig& config, std::size_t jobs, std::ostream& log) {
  validate(config);
  if (config.budget_grid.empty()) throw InvalidConfig("sweep needs a nonempty budget_grid");
  auto out = open_output(config.output_dir, "sweep.csv");
  const InstanceFactory factory(config);
  std::vector<SweepRow> rows;
  for (double budget : config.budget_grid) {
    for (PurchasePolicy policy : config.policies) {
      rows.push_back(summarize(policy, budget, run_trials(config, factory, policy, budget, jobs)));
      const auto& r = rows.back();
      log << to_string(policy) << " B=" << format_number(budget) << " regret " << format_number(r.regret.mean)
          << " +- " << format_number(r.regret.se) << ", risk01 " << format_number(r.risk_zero_one.mean) << " +- "
          << format_number(r.risk_zero_one.se) << ", spend " << format_number(r.spend.mean) << '\n';
    }
  }
  write_sweep_csv(out, rows);
  return rows;
}

json cmd_oracle(const ExperimentConfig& config) {
  validate(config);
  const InstanceFactory factory(config);
  const ProblemInstance inst = factory.make(derive_seed(trial_seed(config.seed, 0), 1), config.budget);
  const OfflineOptimum opt = offline_best(inst.arrivals, inst.space, inst.family, config.oracle_iterations);
  const std::vector<Hypothesis> posted(inst.arrivals.size(), opt.hypothesis);
  const SequenceStats s =
      sequence_stats(inst.arrivals, posted, opt.hypothesis.coords, inst.family, inst.space.norm());

  json coords = json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(opt.hypothesis.size(), 16); ++i) {
    coords.push_back(opt.hypothesis[i]);
  }
  std::string vertex;
  if (inst.space.kind() == SpaceKind::Simplex && inst.space.dimension() == 2) {
    vertex = opt.hypothesis[0] >= 1.0 ? "heads" : opt.hypothesis[1] >= 1.0 ? "tails" : "interior";
  }
  json report{{"instance", to_string(config.instance)},
              {"rounds", inst.arrivals.size()},
              {"dimension", inst.space.dimension()},
              {"hypothesis", coords},
              {"hypothesis_norm", primal_norm(inst.space.norm(), opt.hypothesis.coords)},
              {"total_loss", opt.total_loss},
              {"converged", opt.converged},
              {"gamma_star", s.gamma_star},
              {"c_bar", s.root_cost},
              {"mu", s.mean_cost},
              {"gamma_max_at_optimum", s.gamma_max}};
  if (!vertex.empty()) report["vertex"] = vertex;
  return report;
}

}  // namespace procure
