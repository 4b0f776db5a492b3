// Acceptance runner: one PASS/FAIL/SKIP line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "procure/experiment.hpp"
#include "procure/ftrl.hpp"
#include "procure/pricing.hpp"
#include "procure/random.hpp"

#ifndef PROCURE_LEARN_BINARY
#define PROCURE_LEARN_BINARY "procure_learn"
#endif

using namespace procure;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum class Status { Pass, Fail, Skip } status = Status::Fail;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) {
  return {ok ? Outcome::Status::Pass : Outcome::Status::Fail, std::move(detail)};
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<double> column(const std::vector<TrialResult>& rs, double TrialResult::*field) {
  std::vector<double> out;
  for (const auto& r : rs) out.push_back(r.*field);
  return out;
}

// Paired differences a_i - b_i.
MeanSe paired(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return mean_se(d);
}

// ---------------------------------------------------------------------------

Outcome survival_law() {
  Rng rng(101);
  const std::size_t n = 200000;
  const std::vector<double> costs{0.01, 0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.75, 0.9, 1.0};
  double worst = 0.0;
  for (double delta : {0.1, 0.5, 1.0}) {
    for (double k : {0.5, 2.0, 4.0}) {
      const PricingQuote q{delta, k, 1.0};
      std::vector<double> draws(n);
      for (auto& p : draws) p = sample_price(q, uniform01(rng));
      std::sort(draws.begin(), draws.end());
      for (double c : costs) {
        const auto above = draws.end() - std::lower_bound(draws.begin(), draws.end(), c);
        const double expected = std::min(1.0, delta / (k * std::sqrt(c)));
        worst = std::max(worst, std::abs(static_cast<double>(above) / n - expected));
      }
    }
  }
  return pass_if(worst <= 0.005, "max |empirical - closed form| = " + fmt("%.5f", worst) + " (tol 0.005)");
}

Outcome expected_payment_law() {
  struct Combo {
    double delta, k, c;
  };
  const std::vector<Combo> combos{{0.1, 0.5, 0.05}, {0.1, 2.0, 0.0},  {0.5, 2.0, 0.01},
                                  {0.5, 2.0, 0.3},  {0.5, 4.0, 0.7},  {1.0, 2.0, 0.1},
                                  {1.0, 4.0, 0.5},  {0.3, 0.5, 0.95}, {1.0, 4.0, 0.0}};
  Rng rng(202);
  const std::size_t n = 200000;
  double worst = 0.0;
  bool ok = true;
  for (const auto& cb : combos) {
    const PricingQuote q{cb.delta, cb.k, 1.0};
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sample_price(q, uniform01(rng));
      const double pay = p >= cb.c ? p : 0.0;
      sum += pay;
      sq += pay * pay;
    }
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sq / n - mean * mean) / (n - 1));
    const double lo = std::max(cb.c, cb.delta * cb.delta / (cb.k * cb.k));
    const double formula = cb.delta / cb.k * (2.0 - std::sqrt(lo));
    const double z = se > 0.0 ? std::abs(mean - formula) / se : (mean == formula ? 0.0 : INFINITY);
    worst = std::max(worst, z);
    ok = ok && z <= 3.0;
  }
  return pass_if(ok, "max |MC - formula| / SE = " + fmt("%.2f", worst) + " over 9 combos (tol 3)");
}

Outcome full_information_bound() {
  std::size_t violations = 0, runs = 0;
  double min_slack = INFINITY;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const bool coin = seed % 2 == 0;
    ProblemInstance inst = coin ? gen_coin_sequence(1000, 0.05 + 0.01 * static_cast<double>(seed % 10),
                                                    seed % 4 == 0 ? CoinBias::Heads : CoinBias::Tails, seed)
                                : [&] {
                                    LinearTaskParams p;
                                    p.dimension = 5;
                                    p.rounds = 300;
                                    p.test_size = 0;
                                    p.radius = 5.0;
                                    p.noise = 1.0;
                                    p.family = seed % 3 == 0 ? LossFamily::logistic() : LossFamily::hinge();
                                    return gen_linear_task(p, ConstantCost{1.0}, seed);
                                  }();
    const double eta = std::vector<double>{0.01, 0.05, 0.2, 1.0}[seed % 4];
    FtrlLearner l = FtrlLearner::for_space(inst.space, eta);
    double online = 0.0, squares = 0.0;
    for (const auto& a : inst.arrivals) {
      const Hypothesis h = l.post();
      online += eval_loss(inst.family, h.coords, a.data);
      Vector g = eval_gradient(inst.family, h.coords, a.data);
      const double delta = dual_norm(inst.space.norm(), g);
      squares += delta * delta;
      l.feed(WeightedFeed::weighted(std::move(g), 1.0, delta));
    }
    const double bound = inst.space.beta() / eta + 2.0 * eta * squares;
    const auto best = offline_best(inst.arrivals, inst.space, inst.family, 20000);
    const double regret = online - best.total_loss;
    ++runs;
    if (regret > bound) ++violations;
    min_slack = std::min(min_slack, bound - regret);
  }
  return pass_if(violations == 0, std::to_string(violations) + " violations in " + std::to_string(runs) +
                                      " runs; min(bound - regret) = " + fmt("%.4g", min_slack));
}

Outcome budget_compliance() {
  ExperimentConfig c;
  c.instance = InstanceKind::Gamma;
  c.rounds = 10000;
  c.gamma = 0.3;
  c.epsilon = 0.1;
  c.test_size = 0;
  c.budget = 200;
  c.k_policy = KChoice::Knowledge;
  c.knowledge = KnowledgeKind::GammaAndMax;
  c.known_gamma = 0.3;
  c.known_gamma_max = 0.3;
  c.trials = 100;
  c.seed = 404;
  c.compute_regret = false;
  const InstanceFactory f(c);
  const auto rs = run_trials(c, f, PurchasePolicy::Priced, c.budget, jobs());
  const auto s = mean_se(column(rs, &TrialResult::spend));
  return pass_if(s.mean <= 1.05 * c.budget,
                 "mean spend " + fmt("%.2f", s.mean) + " +- " + fmt("%.2f", s.se) + " vs limit 210");
}

Outcome regret_scaling() {
  ExperimentConfig c;
  c.instance = InstanceKind::Coin;
  c.rounds = 20000;
  c.epsilon_from_budget = true;
  c.bias = BiasChoice::Random;
  c.test_size = 0;
  c.payment = PaymentMode::AtCost;
  c.trials = 200;
  c.seed = 505;
  const InstanceFactory f(c);
  std::vector<double> means;
  std::string detail;
  for (double b : {100.0, 400.0, 1600.0}) {
    const auto s = mean_se(column(run_trials(c, f, PurchasePolicy::Priced, b, jobs()), &TrialResult::regret));
    means.push_back(s.mean);
    detail += "B=" + fmt("%g", b) + ": " + fmt("%.2f", s.mean) + " +- " + fmt("%.2f", s.se) + "; ";
  }
  bool ok = true;
  for (std::size_t i = 0; i + 1 < means.size(); ++i) {
    const double ratio = means[i] / means[i + 1];
    ok = ok && means[i + 1] < means[i] && ratio >= 1.3 && ratio <= 3.0;
    detail += "ratio " + fmt("%.3f", ratio) + (i + 2 < means.size() ? ", " : "");
  }
  return pass_if(ok, detail);
}

ExperimentConfig synthetic_task() {
  ExperimentConfig c;
  c.instance = InstanceKind::Linear;
  c.dimension = 50;
  c.clusters = 4;
  c.separation = 2.0;
  c.noise = 4.0;
  c.radius = 10.0;
  c.test_size = 2000;
  c.loss = LossKind::Hinge;
  c.k_policy = KChoice::Adaptive;
  c.eta_policy = EtaChoice::FeatureNorm;
  c.compute_regret = false;
  c.trials = 100;
  return c;
}

Outcome correlation_sensitivity() {
  auto base = synthetic_task();
  base.rounds = 2000;
  base.cost_model = "two-point-independent";
  base.p_high = 0.2;
  base.high_cost = 1.0;
  base.seed = 606;
  // Matched marginals: E sum c_t = 0.2 T, so B = 0.25 * 0.2 T.
  const double budget = 0.25 * base.p_high * base.high_cost * static_cast<double>(base.rounds);
  auto corr = base;
  corr.cost_model = "two-point-correlated";
  const InstanceFactory fi(base), fc(corr);

  const auto pi = run_trials(base, fi, PurchasePolicy::Priced, budget, jobs());
  const auto pc = run_trials(corr, fc, PurchasePolicy::Priced, budget, jobs());
  const auto ni = run_trials(base, fi, PurchasePolicy::Naive, budget, jobs());
  const auto nc = run_trials(corr, fc, PurchasePolicy::Naive, budget, jobs());

  std::vector<double> gi, gc;
  for (const auto& r : pi) gi.push_back(r.stats.gamma);
  for (const auto& r : pc) gc.push_back(r.stats.gamma);
  const double ratio = mean_se(gc).mean / mean_se(gi).mean;
  const auto priced = paired(column(pc, &TrialResult::risk_zero_one), column(pi, &TrialResult::risk_zero_one));
  const auto naive = paired(column(nc, &TrialResult::risk_zero_one), column(ni, &TrialResult::risk_zero_one));
  const bool gamma_ok = ratio >= 1.5;
  const bool priced_ok = priced.mean > 0.0 && priced.mean >= 3.0 * priced.se;
  const bool naive_ok = std::abs(naive.mean) <= 2.0 * naive.se || naive.mean == 0.0;
  return pass_if(gamma_ok && priced_ok && naive_ok,
                 "B=" + fmt("%g", budget) + ", T=2000; gamma ratio " + fmt("%.3f", ratio) + " (>= 1.5); priced " +
                     "risk diff " + fmt("%.5f", priced.mean) + " SE " + fmt("%.5f", priced.se) + " (>= 3 SE); naive " +
                     "risk diff " + fmt("%.5f", naive.mean) + " SE " + fmt("%.5f", naive.se) + " (within 2 SE)");
}

Outcome ours_vs_naive() {
  auto c = synthetic_task();
  c.rounds = 8000;
  c.cost_model = "uniform";
  c.cost_lo = 0.0;
  c.cost_hi = 1.0;
  c.seed = 707;
  const InstanceFactory f(c);
  bool ok = true;
  std::string detail;
  for (double b : {100.0, 200.0, 400.0}) {
    const auto ours = mean_se(column(run_trials(c, f, PurchasePolicy::Priced, b, jobs()), &TrialResult::risk_zero_one));
    const auto naive = mean_se(column(run_trials(c, f, PurchasePolicy::Naive, b, jobs()), &TrialResult::risk_zero_one));
    ok = ok && ours.mean <= naive.mean;
    detail += "B=" + fmt("%g", b) + ": ours " + fmt("%.4f", ours.mean) + " naive " + fmt("%.4f", naive.mean) +
              (b < 400.0 ? "; " : "");
  }
  return pass_if(ok, detail);
}

Outcome online_to_batch() {
  std::size_t runs = 0, violations = 0;
  double min_gap = INFINITY;
  auto check = [&](ExperimentConfig c) {
    c.per_round_risk = true;
    c.compute_regret = false;
    const InstanceFactory f(c);
    for (auto policy : {PurchasePolicy::Priced, PurchasePolicy::Naive, PurchasePolicy::Baseline}) {
      for (const auto& r : run_trials(c, f, policy, c.budget, jobs())) {
        ++runs;
        const double gap = r.mean_round_risk - r.risk_surrogate;
        if (!(gap >= 0.0)) ++violations;
        min_gap = std::min(min_gap, gap);
      }
    }
  };
  for (auto loss : {LossKind::Hinge, LossKind::Logistic, LossKind::SquaredHinge}) {
    for (const char* model : {"uniform", "two-point-independent", "two-point-correlated"}) {
      ExperimentConfig c;
      c.instance = InstanceKind::Linear;
      c.rounds = 800;
      c.test_size = 400;
      c.dimension = 10;
      c.clusters = 2;
      c.noise = 1.0;
      c.loss = loss;
      c.cost_model = model;
      c.budget = 40;
      c.trials = 10;
      c.seed = 808;
      check(c);
    }
  }
  auto s = synthetic_task();
  s.rounds = 2000;
  s.test_size = 500;
  s.trials = 10;
  s.budget = 100;
  s.seed = 809;
  check(s);
  return pass_if(violations == 0, std::to_string(violations) + " violations in " + std::to_string(runs) +
                                      " runs; min gap " + fmt("%.3g", min_gap));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  std::random_device rd;
  const fs::path root = fs::temp_directory_path() / ("procure_accept_" + std::to_string(rd()));
  fs::create_directories(root);
  bool ok = true;
  std::string detail;
  const std::vector<std::pair<std::string, nlohmann::json>> configs{
      {"coin", {{"instance", "coin"}, {"rounds", 3000}, {"budget", 50}, {"trials", 4}, {"seed", 9}}},
      {"linear",
       {{"instance", "linear"},
        {"rounds", 1500},
        {"dimension", 8},
        {"test_size", 300},
        {"budget", 30},
        {"trials", 3},
        {"seed", 10},
        {"cost_model", "two-point-correlated"},
        {"eta_policy", "feature-norm"}}}};
  for (const auto& [name, cfg] : configs) {
    std::vector<std::string> outputs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = root / (name + std::to_string(rep));
      auto j = cfg;
      j["output_dir"] = out.string();
      const fs::path cfg_path = root / (name + std::to_string(rep) + ".json");
      std::ofstream(cfg_path) << j.dump(2);
      const std::string cmd = std::string("\"") + PROCURE_LEARN_BINARY + "\" run --config \"" + cfg_path.string() +
                              "\" --jobs " + std::to_string(rep + 1) + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        ok = false;
        detail += name + ": run failed; ";
        break;
      }
      outputs.push_back(slurp(out / "transcript.csv") + '\0' + slurp(out / "summary.csv"));
    }
    if (outputs.size() == 2) {
      const bool same = outputs[0] == outputs[1] && outputs[0].size() > 100;
      ok = ok && same;
      detail += name + (same ? " identical (" + std::to_string(outputs[0].size()) + " bytes); " : " DIFFER; ");
    }
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  return pass_if(ok, detail);
}

Outcome mnist_replication() {
  const char* images = std::getenv("PROCURE_MNIST_IMAGES");
  const char* labels = std::getenv("PROCURE_MNIST_LABELS");
  if (!images || !labels) {
    return {Outcome::Status::Skip, "set PROCURE_MNIST_IMAGES and PROCURE_MNIST_LABELS to run"};
  }
  ExperimentConfig c;
  c.instance = InstanceKind::Idx;
  c.idx_images = images;
  c.idx_labels = labels;
  c.train_fraction = 0.5;
  c.eta_policy = EtaChoice::FeatureNorm;
  c.cost_model = "uniform";
  c.compute_regret = false;
  c.trials = 20;
  c.seed = 1010;
  const InstanceFactory f(c);
  const auto inst = f.make(trial_seed(c.seed, 0), c.budget);
  const double train = inst.truth.at("train_size");
  bool ok = train == 8503.0;
  std::string detail = "train size " + fmt("%g", train) + " (expected 8503); ";
  for (double b : {100.0, 300.0, 1000.0}) {
    const auto base = mean_se(column(run_trials(c, f, PurchasePolicy::Baseline, b, jobs()), &TrialResult::risk_zero_one));
    const auto ours = mean_se(column(run_trials(c, f, PurchasePolicy::Priced, b, jobs()), &TrialResult::risk_zero_one));
    const auto naive = mean_se(column(run_trials(c, f, PurchasePolicy::Naive, b, jobs()), &TrialResult::risk_zero_one));
    ok = ok && base.mean <= ours.mean && ours.mean <= naive.mean;
    detail += "B=" + fmt("%g", b) + ": " + fmt("%.4f", base.mean) + " <= " + fmt("%.4f", ours.mean) + " <= " +
              fmt("%.4f", naive.mean) + "; ";
  }
  return pass_if(ok, detail);
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "pricing-law fidelity", 5, survival_law},
      {2, "expected payment", 5, expected_payment_law},
      {3, "full-information FTRL bound", 30, full_information_bound},
      {4, "budget compliance", 60, budget_compliance},
      {5, "no data, no regret scaling", 600, regret_scaling},
      {6, "correlation sensitivity", 600, correlation_sensitivity},
      {7, "ours vs naive", 600, ours_vs_naive},
      {8, "online-to-batch inequality", INFINITY, online_to_batch},
      {9, "determinism", INFINITY, determinism},
      {10, "MNIST replication", INFINITY, mnist_replication},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Outcome::Status::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status == Outcome::Status::Pass && secs > c.limit_seconds) {
      o.status = Outcome::Status::Fail;
      o.detail += " [over time limit " + fmt("%g", c.limit_seconds) + " s]";
    }
    const char* tag = o.status == Outcome::Status::Pass ? "PASS" : o.status == Outcome::Status::Fail ? "FAIL" : "SKIP";
    if (o.status == Outcome::Status::Fail) all = false;
    std::cout << tag << " criterion " << c.id << " (" << c.name << "): " << o.detail << " [" << fmt("%.1f", secs)
              << " s]" << std::endl;
  }
  return all ? 0 : 1;
}
