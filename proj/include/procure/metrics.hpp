#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "procure/core.hpp"
#include "procure/mechanism.hpp"

namespace procure {

struct OfflineOptimum {
  Hypothesis hypothesis;
  double total_loss = 0.0;
  bool converged = true;
  std::size_t iterations = 0;
};

/// Best fixed hypothesis in hindsight on the full arrival sequence.
///
/// Simplex spaces with linear (or constant) losses are solved exactly by
/// vertex enumeration. On an l2 ball the objective is minimized with
/// accelerated projected gradient descent; the hinge loss goes through a
/// continuation over Huber-smoothed surrogates and the best exact objective
/// seen is returned. `converged` is false if the iteration cap was hit.
OfflineOptimum offline_best(std::span<const Arrival> arrivals, const HypothesisSpace& space, const LossFamily& family,
                            std::size_t max_iterations = 5000);

double total_loss(std::span<const Arrival> arrivals, const LossFamily& family, std::span<const double> h);

/// sum_t f_t(h_t) - sum_t f_t(h*), with f_t(h_t) read from the transcript.
double regret(std::span<const RoundRecord> transcript, std::span<const Arrival> arrivals, const LossFamily& family,
              std::span<const double> best);

enum class RiskMetric { Surrogate, ZeroOne };

double risk(std::span<const double> h, std::span<const DataPoint> test_set, const LossFamily& family,
            RiskMetric metric);

struct SequenceStats {
  double gamma = 0.0;
  double gamma_max = 0.0;
  double root_cost = 0.0;  // c-bar
  double mean_cost = 0.0;  // mu
  double gamma_star = 0.0;
};

SequenceStats sequence_stats(std::span<const Arrival> arrivals, std::span<const Hypothesis> posted,
                             std::span<const double> best, const LossFamily& family, NormKind norm);

/// Same statistics with the data values taken from a transcript's delta column.
SequenceStats sequence_stats(std::span<const Arrival> arrivals, std::span<const RoundRecord> transcript,
                             std::span<const double> best, const LossFamily& family, NormKind norm);

}  // namespace procure
