#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <string>

#include "procure/experiment.hpp"
#include "procure/random.hpp"

namespace procure {

namespace {

using nlohmann::json;

std::string describe(const char* fmt, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

// Dvoretzky-Kiefer-Wolfowitz half-width at level alpha.
double dkw(std::size_t n, double alpha) { return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n))); }

std::vector<PricingQuote> survival_quotes() {
  std::vector<PricingQuote> quotes;
  for (double delta : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    for (double k : {0.5, 1.0, 2.0, 4.0}) quotes.push_back({delta, k, 1.0});
  }
  return quotes;
}

std::vector<double> cost_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(0.1 * i - 0.05);
  return grid;
}

CheckResult check_survival(const VerifyOptions& o) {
  const std::size_t n = o.quick ? 20000 : 200000;
  const double tol = o.quick ? dkw(n, 1e-4) : 0.005;
  Rng rng(derive_seed(o.seed, 11));
  const auto grid = cost_grid();
  double worst = 0.0, at_expected = 0.0, at_observed = 0.0;
  std::string where;
  for (const auto& quote : survival_quotes()) {
    std::vector<std::size_t> hits(grid.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = o.sampler(quote, uniform01(rng));
      for (std::size_t j = 0; j < grid.size(); ++j) hits[j] += p >= grid[j];
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double observed = static_cast<double>(hits[j]) / static_cast<double>(n);
      const double expected = survival(quote, grid[j]);
      if (std::abs(observed - expected) > worst) {
        worst = std::abs(observed - expected);
        at_expected = expected;
        at_observed = observed;
        where = describe("delta=%g K=%g c=%g", quote.delta, quote.k, grid[j]);
      }
    }
  }
  return {"pricing.empirical_survival", worst <= tol, at_observed, at_expected, tol,
          "largest deviation at " + where};
}

CheckResult check_monotonicity() {
  std::size_t violations = 0;
  std::string first;
  auto note = [&](const std::string& what) {
    if (violations++ == 0) first = what;
  };
  const std::vector<double> deltas{0.0, 0.05, 0.1, 0.3, 0.5, 0.9, 1.0};
  const std::vector<double> ks{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> costs;
  for (int i = 0; i <= 40; ++i) costs.push_back(i / 40.0);
  for (double d : deltas) {
    for (double k : ks) {
      for (std::size_t i = 1; i < costs.size(); ++i) {
        if (survival({d, k, 1.0}, costs[i]) > survival({d, k, 1.0}, costs[i - 1])) {
          note(describe("increasing in c at delta=%g K=%g c=%g", d, k, costs[i]));
        }
      }
    }
  }
  for (double c : costs) {
    for (double d : deltas) {
      for (std::size_t i = 1; i < ks.size(); ++i) {
        if (survival({d, ks[i], 1.0}, c) > survival({d, ks[i - 1], 1.0}, c)) {
          note(describe("increasing in K at delta=%g K=%g c=%g", d, ks[i], c));
        }
      }
    }
    for (double k : ks) {
      for (std::size_t i = 1; i < deltas.size(); ++i) {
        if (survival({deltas[i], k, 1.0}, c) < survival({deltas[i - 1], k, 1.0}, c)) {
          note(describe("decreasing in delta at delta=%g K=%g c=%g", deltas[i], k, c));
        }
      }
    }
  }
  return {"pricing.monotonicity", violations == 0, static_cast<double>(violations), 0.0, 0.0,
          violations == 0 ? "survival monotone on the grid" : first};
}

CheckResult check_roundtrip(const VerifyOptions& o) {
  double worst = 0.0;
  std::size_t boundary_errors = 0;
  for (const auto& quote : survival_quotes()) {
    const double mass = std::min(1.0, quote.delta / (quote.k * std::sqrt(quote.c_max)));
    for (int i = 0; i < 1000; ++i) {
      const double u = (i + 0.5) / 1000.0;
      const double p = o.sampler(quote, u);
      if (p >= quote.c_max) {
        boundary_errors += u < 1.0 - mass - 1e-12;
        continue;
      }
      boundary_errors += u >= 1.0 - mass;
      worst = std::max(worst, std::abs(price_cdf(quote, p) - u));
    }
  }
  const bool ok = worst <= 1e-12 && boundary_errors == 0;
  return {"pricing.cdf_roundtrip", ok, worst, 0.0, 1e-12,
          std::to_string(boundary_errors) + " draw(s) on the wrong side of the point mass"};
}

CheckResult check_expected_payment(const VerifyOptions& o) {
  const std::size_t n = o.quick ? 20000 : 200000;
  Rng rng(derive_seed(o.seed, 13));
  double worst_z = 0.0, observed_at = 0.0, expected_at = 0.0;
  std::string where;
  for (double delta : {0.2, 0.5, 1.0}) {
    for (double k : {1.0, 2.0}) {
      for (double c : {0.0, 0.3, 0.81}) {
        if (k == 1.0 && c == 0.3) continue;
        const PricingQuote quote{delta, k, 1.0};
        double sum = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double p = o.sampler(quote, uniform01(rng));
          const double pay = p >= c ? p : 0.0;
          sum += pay;
          sq += pay * pay;
        }
        const double mean = sum / static_cast<double>(n);
        const double var = std::max(0.0, sq / static_cast<double>(n) - mean * mean);
        const double se = std::max(std::sqrt(var / static_cast<double>(n)), 1e-15);
        const double expected = expected_payment(quote, c);
        const double z = std::abs(mean - expected) / se;
        if (z > worst_z) {
          worst_z = z;
          observed_at = mean;
          expected_at = expected;
          where = describe("delta=%g K=%g c=%g", delta, k, c);
        }
      }
    }
  }
  return {"pricing.expected_payment", worst_z <= 3.0, observed_at, expected_at, 3.0,
          "largest standardized deviation " + format_number(worst_z) + " at " + where};
}

CheckResult check_acceptance_identity(const VerifyOptions& o) {
  const std::size_t replays = o.quick ? 4000 : 10000;
  const double tol = o.quick ? 0.02 : 0.01;
  const auto space = HypothesisSpace::simplex(2);
  Rng rng(derive_seed(o.seed, 17));
  double worst = 0.0, obs_at = 0.0, exp_at = 0.0;
  std::string where;
  for (double k : {1.5, 3.0}) {
    for (double cost : {0.2, 0.6}) {
      const Arrival arrival{cost, CoinOutcome{0}};
      MechanismConfig mc;
      mc.rounds = 1;
      mc.budget = 1.0;
      mc.k_policy = FixedK{k};
      mc.eta_policy = FixedEta{0.1};
      std::size_t accepted = 0;
      double q = 0.0;
      for (std::size_t r = 0; r < replays; ++r) {
        Mechanism m(mc, space, LossFamily::linear_simplex());
        const RoundRecord& rec = m.step(arrival, uniform01(rng));
        accepted += rec.accepted;
        q = rec.q;
      }
      const double rate = static_cast<double>(accepted) / static_cast<double>(replays);
      if (std::abs(rate - q) >= worst) {
        worst = std::abs(rate - q);
        obs_at = rate;
        exp_at = q;
        where = describe("K=%g c=%g (%g replays)", k, cost, static_cast<double>(replays));
      }
    }
  }
  return {"pricing.acceptance_identity", worst <= tol, obs_at, exp_at, tol, where};
}

double full_information_gap(const ProblemInstance& inst, double eta) {
  FtrlLearner learner = FtrlLearner::for_space(inst.space, eta);
  double online = 0.0;
  for (const auto& a : inst.arrivals) {
    const Hypothesis h = learner.post();
    online += eval_loss(inst.family, h.coords, a.data);
    Vector g = eval_gradient(inst.family, h.coords, a.data);
    const double delta = dual_norm(inst.space.norm(), g);
    learner.feed(WeightedFeed::weighted(std::move(g), 1.0, delta));
  }
  const OfflineOptimum best = offline_best(inst.arrivals, inst.space, inst.family);
  return learner.regret_bound() - (online - best.total_loss);
}

CheckResult check_full_information_bound(const VerifyOptions& o) {
  const std::size_t instances = o.quick ? 10 : 50;
  double tightest = std::numeric_limits<double>::infinity();
  std::size_t failures = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::uint64_t seed = derive_seed(o.seed, 100 + i);
    auto make = [&] {
      if (i % 2 == 0) {
        return gen_coin_sequence(400, 0.05 * static_cast<double>(i % 5),
                                 i % 4 == 0 ? CoinBias::Heads : CoinBias::Tails, seed);
      }
      LinearTaskParams p;
      p.dimension = 5;
      p.rounds = 200;
      p.test_size = 0;
      p.radius = 5.0;
      p.family = i % 3 == 0 ? LossFamily::logistic() : LossFamily::hinge();
      return gen_linear_task(p, ConstantCost{1.0}, seed);
    };
    const ProblemInstance inst = make();
    const double eta = choose_eta(0.0, inst.arrivals.size(), 1.0, inst.space.beta());
    const double slack = full_information_gap(inst, eta);
    failures += slack < 0.0;
    tightest = std::min(tightest, slack);
  }
  return {"ftrl.full_information_bound", failures == 0, tightest, 0.0, 0.0,
          "minimum of bound minus regret over " + std::to_string(instances) + " instances; " +
              std::to_string(failures) + " violation(s)"};
}

CheckResult check_unbiasedness(const VerifyOptions& o) {
  const std::size_t n = o.quick ? 20000 : 100000;
  Rng rng(derive_seed(o.seed, 19));
  const LossFamily family = LossFamily::hinge();
  const Vector h{0.3, -0.2, 0.1};
  const DataPoint z = LabeledPoint{{0.5, 0.4, -0.3}, 1};
  const double f = eval_loss(family, h, z);
  double worst_z = 0.0, obs_at = 0.0;
  for (double q : {0.05, 0.3, 0.8}) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = uniform01(rng) < q ? f / q : 0.0;
      sum += v;
      sq += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double se = std::sqrt(std::max(0.0, sq / static_cast<double>(n) - mean * mean) / static_cast<double>(n));
    const double zscore = std::abs(mean - f) / std::max(se, 1e-15);
    if (zscore >= worst_z) {
      worst_z = zscore;
      obs_at = mean;
    }
  }
  return {"ftrl.unbiasedness", worst_z <= 3.0, obs_at, f, 3.0,
          "largest standardized deviation " + format_number(worst_z)};
}

std::vector<Vector> random_gradients(Rng& rng, std::size_t count, std::size_t d, double scale) {
  std::vector<Vector> out(count, Vector(d));
  for (auto& g : out) {
    for (auto& x : g) x = scale * (2.0 * uniform01(rng) - 1.0);
  }
  return out;
}

CheckResult check_simplex_validity(const VerifyOptions& o) {
  Rng rng(derive_seed(o.seed, 23));
  double worst_sum = 0.0, most_negative = 0.0;
  for (double scale : {1.0, 50.0, 1e4}) {
    FtrlLearner learner(HypothesisSpace::simplex(5), Regularizer::NegEntropy, 0.7);
    for (const auto& g : random_gradients(rng, 500, 5, scale)) {
      learner.feed(WeightedFeed::weighted(g, 1.0 / (0.05 + uniform01(rng)), dual_norm(NormKind::L1, g)));
      double total = 0.0;
      for (double x : learner.post().coords) {
        total += x;
        most_negative = std::min(most_negative, x);
      }
      worst_sum = std::max(worst_sum, std::abs(total - 1.0));
    }
  }
  return {"ftrl.simplex_validity", worst_sum <= 1e-9 && most_negative >= 0.0, worst_sum, 0.0, 1e-9,
          "most negative coordinate " + format_number(most_negative)};
}

CheckResult check_zero_feed_neutrality(const VerifyOptions& o) {
  Rng rng(derive_seed(o.seed, 29));
  std::size_t mismatches = 0;
  for (const auto& space : {HypothesisSpace::simplex(4), HypothesisSpace::l2_ball(4, 2.0)}) {
    FtrlLearner plain = FtrlLearner::for_space(space, 0.3);
    FtrlLearner padded = FtrlLearner::for_space(space, 0.3);
    for (const auto& g : random_gradients(rng, 300, 4, 1.0)) {
      const std::size_t zeros = static_cast<std::size_t>(uniform01(rng) * 4.0);
      for (std::size_t i = 0; i < zeros; ++i) {
        const Hypothesis before = padded.post();
        padded.feed(WeightedFeed::zero_function());
        mismatches += !(padded.post() == before);
      }
      const auto feed = WeightedFeed::weighted(g, 1.0, dual_norm(space.norm(), g));
      plain.feed(feed);
      padded.feed(feed);
      mismatches += !(plain.post() == padded.post());
    }
  }
  return {"ftrl.zero_feed_neutrality", mismatches == 0, static_cast<double>(mismatches), 0.0, 0.0,
          "hypotheses changed by zero feeds"};
}

CheckResult check_determinism(const VerifyOptions& o) {
  std::size_t mismatches = 0;
  for (const auto& space : {HypothesisSpace::simplex(3), HypothesisSpace::l2_ball(3, 1.0)}) {
    Rng rng(derive_seed(o.seed, 31));
    const auto feeds = random_gradients(rng, 400, 3, 2.0);
    FtrlLearner a = FtrlLearner::for_space(space, 0.2);
    FtrlLearner b = FtrlLearner::for_space(space, 0.2);
    for (const auto& g : feeds) {
      a.feed(WeightedFeed::weighted(g, 1.5, 1.0));
      b.feed(WeightedFeed::weighted(g, 1.5, 1.0));
      for (std::size_t i = 0; i < g.size(); ++i) {
        mismatches += std::memcmp(&a.post().coords[i], &b.post().coords[i], sizeof(double)) != 0;
      }
    }
  }
  return {"ftrl.determinism", mismatches == 0, static_cast<double>(mismatches), 0.0, 0.0,
          "bitwise mismatches between identical feed sequences"};
}

}  // namespace

std::vector<CheckResult> cmd_verify(const VerifyOptions& options) {
  return {check_survival(options),
          check_monotonicity(),
          check_roundtrip(options),
          check_expected_payment(options),
          check_acceptance_identity(options),
          check_full_information_bound(options),
          check_unbiasedness(options),
          check_simplex_validity(options),
          check_zero_feed_neutrality(options),
          check_determinism(options)};
}

json verify_report_json(const std::vector<CheckResult>& checks) {
  json list = json::array();
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.passed;
    list.push_back({{"name", c.name},
                    {"passed", c.passed},
                    {"observed", c.observed},
                    {"expected", c.expected},
                    {"tolerance", c.tolerance},
                    {"detail", c.detail}});
  }
  return {{"passed", all}, {"checks", list}};
}

}  // namespace procure
