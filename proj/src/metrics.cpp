#include "procure/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "procure/pricing.hpp"

namespace procure {

namespace {

// Objective over the arrivals with an optional Huber smoothing of the hinge
// (mu > 0). Returns the value and writes the gradient.
double smooth_objective(std::span<const Arrival> arrivals, const LossFamily& family, double mu,
                        std::span<const double> h, Vector& grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  if (family.kind != LossKind::Hinge || mu <= 0.0) {
    double total = 0.0;
    for (const auto& a : arrivals) {
      total += eval_loss(family, h, a.data);
      const Vector g = eval_gradient(family, h, a.data);
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
    }
    return total;
  }
  double total = 0.0;
  for (const auto& a : arrivals) {
    const auto* p = std::get_if<LabeledPoint>(&a.data);
    if (p == nullptr) {
      total += eval_loss(family, h, a.data);
      continue;
    }
    const double slack = 1.0 - p->label * dot(h, p->features);
    if (slack <= 0.0) continue;
    double slope = 1.0;
    if (slack < mu) {
      total += slack * slack / (2.0 * mu);
      slope = slack / mu;
    } else {
      total += slack - mu / 2.0;
    }
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] -= slope * p->label * p->features[i];
  }
  return total;
}

struct StageResult {
  Vector x;
  bool converged = false;
};

// Accelerated projected gradient with backtracking and function-value restart.
// Tracks the best exact objective in `best`.
StageResult fista(std::span<const Arrival> arrivals, const HypothesisSpace& space, const LossFamily& family, double mu,
                  Vector start, std::size_t& budget, OfflineOptimum& best) {
  const std::size_t d = space.dimension();
  Vector x = std::move(start), y = x, grad(d), scratch(d);
  double t = 1.0;
  double lipschitz = 1.0;
  double fx = smooth_objective(arrivals, family, mu, x, grad);
  int quiet = 0;

  while (budget > 0) {
    --budget;
    ++best.iterations;
    const double fy = smooth_objective(arrivals, family, mu, y, grad);
    Vector z;
    double fz = 0.0;
    for (;;) {
      Vector step(d);
      for (std::size_t i = 0; i < d; ++i) step[i] = y[i] - grad[i] / lipschitz;
      z = project(space, step).coords;
      fz = smooth_objective(arrivals, family, mu, z, scratch);
      double model = fy;
      double sq = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = z[i] - y[i];
        model += grad[i] * diff;
        sq += diff * diff;
      }
      model += lipschitz / 2.0 * sq;
      if (fz <= model + 1e-12 * std::abs(model) || lipschitz > 1e15) break;
      lipschitz *= 2.0;
    }

    const double exact = total_loss(arrivals, family, z);
    if (exact < best.total_loss) {
      best.total_loss = exact;
      best.hypothesis = Hypothesis{z};
    }

    if (fz > fx) {
      // Restart momentum from the last accepted point.
      t = 1.0;
      y = x;
      lipschitz *= 0.9;
      continue;
    }
    const double change = (fx - fz) / std::max(std::abs(fx), 1e-12);
    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    for (std::size_t i = 0; i < d; ++i) y[i] = z[i] + (t - 1.0) / t_next * (z[i] - x[i]);
    x = std::move(z);
    fx = fz;
    t = t_next;
    lipschitz *= 0.9;
    quiet = change < 1e-8 ? quiet + 1 : 0;
    if (quiet >= 5 || fx == 0.0) return {x, true};
  }
  return {x, false};
}

}  // namespace

double total_loss(std::span<const Arrival> arrivals, const LossFamily& family, std::span<const double> h) {
  double total = 0.0;
  for (const auto& a : arrivals) total += eval_loss(family, h, a.data);
  return total;
}

OfflineOptimum offline_best(std::span<const Arrival> arrivals, const HypothesisSpace& space, const LossFamily& family,
                            std::size_t max_iterations) {
  if (arrivals.empty()) throw InvalidInput("offline_best needs at least one arrival");
  const std::size_t d = space.dimension();

  if (space.kind() == SpaceKind::Simplex && family.kind == LossKind::LinearSimplex) {
    OfflineOptimum best;
    best.total_loss = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) {
      Vector vertex(d, 0.0);
      vertex[i] = 1.0;
      const double loss = total_loss(arrivals, family, vertex);
      if (loss < best.total_loss) {
        best.total_loss = loss;
        best.hypothesis = Hypothesis{std::move(vertex)};
      }
    }
    return best;
  }

  Vector start = space.kind() == SpaceKind::Simplex ? Vector(d, 1.0 / static_cast<double>(d)) : Vector(d, 0.0);
  OfflineOptimum best;
  best.hypothesis = Hypothesis{start};
  best.total_loss = total_loss(arrivals, family, start);

  std::size_t budget = max_iterations;
  if (family.kind != LossKind::Hinge) {
    best.converged = fista(arrivals, space, family, 0.0, start, budget, best).converged;
    return best;
  }
  bool converged = false;
  for (double mu = 0.5; mu >= 1e-6 && budget > 0; mu *= 0.2) {
    StageResult stage = fista(arrivals, space, family, mu, std::move(start), budget, best);
    start = std::move(stage.x);
    converged = stage.converged;
    if (best.total_loss == 0.0) break;
  }
  best.converged = converged || best.total_loss == 0.0;
  return best;
}

double regret(std::span<const RoundRecord> transcript, std::span<const Arrival> arrivals, const LossFamily& family,
              std::span<const double> best) {
  if (transcript.size() != arrivals.size()) throw InvalidInput("transcript and arrivals differ in length");
  double online = 0.0;
  for (const auto& r : transcript) online += r.loss;
  return online - total_loss(arrivals, family, best);
}

double risk(std::span<const double> h, std::span<const DataPoint> test_set, const LossFamily& family,
            RiskMetric metric) {
  if (test_set.empty()) throw InvalidInput("risk needs a nonempty test set");
  double total = 0.0;
  for (const auto& z : test_set) total += metric == RiskMetric::Surrogate ? eval_loss(family, h, z) : zero_one(h, z);
  return total / static_cast<double>(test_set.size());
}

namespace {

template <class DeltaAt>
SequenceStats accumulate_stats(std::span<const Arrival> arrivals, DeltaAt delta_at, std::span<const double> best,
                               const LossFamily& family, NormKind norm) {
  SequenceStats s;
  if (arrivals.empty()) return s;
  for (std::size_t t = 0; t < arrivals.size(); ++t) {
    const double root = std::sqrt(arrivals[t].cost);
    const double delta = delta_at(t);
    s.gamma += delta * root;
    s.gamma_max += delta;
    s.root_cost += root;
    s.mean_cost += arrivals[t].cost;
    s.gamma_star += data_value(best, family, arrivals[t].data, norm) * root;
  }
  const double n = static_cast<double>(arrivals.size());
  s.gamma /= n;
  s.gamma_max /= n;
  s.root_cost /= n;
  s.mean_cost /= n;
  s.gamma_star /= n;
  return s;
}

}  // namespace

SequenceStats sequence_stats(std::span<const Arrival> arrivals, std::span<const Hypothesis> posted,
                             std::span<const double> best, const LossFamily& family, NormKind norm) {
  if (posted.size() != arrivals.size()) throw InvalidInput("posted hypotheses and arrivals differ in length");
  return accumulate_stats(
      arrivals, [&](std::size_t t) { return data_value(posted[t].coords, family, arrivals[t].data, norm); }, best,
      family, norm);
}

SequenceStats sequence_stats(std::span<const Arrival> arrivals, std::span<const RoundRecord> transcript,
                             std::span<const double> best, const LossFamily& family, NormKind norm) {
  if (transcript.size() != arrivals.size()) throw InvalidInput("transcript and arrivals differ in length");
  return accumulate_stats(
      arrivals, [&](std::size_t t) { return transcript[t].delta; }, best, family, norm);
}

}  // namespace procure
