#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "procure/core.hpp"

namespace procure {

struct ConstantCost {
  double cost = 0.0;
};
struct UniformCost {
  double lo = 0.0;
  double hi = 1.0;
};
/// High cost with marginal probability p_high, concentrated on the target
/// groups; everything else is free.
struct TwoPointCorrelatedCost {
  double p_high = 0.2;
  double high_cost = 1.0;
  std::vector<int> target_groups;
};
struct TwoPointIndependentCost {
  double p_high = 0.2;
  double high_cost = 1.0;
};
using CostModel = std::variant<ConstantCost, UniformCost, TwoPointCorrelatedCost, TwoPointIndependentCost>;

/// Data points with a group tag each (digit for IDX data, cluster for
/// synthetic tasks, -1 when meaningless).
struct Dataset {
  std::vector<DataPoint> points;
  std::vector<int> groups;

  std::size_t size() const { return points.size(); }
};

struct ProblemInstance {
  std::vector<Arrival> arrivals;
  std::vector<DataPoint> test_set;
  HypothesisSpace space;
  LossFamily family;
  std::vector<int> groups;
  std::map<std::string, double> truth;
};

enum class CoinBias { Heads, Tails };

/// T i.i.d. flips of a coin with heads probability 1/2 +- eps, all at cost 1,
/// on the 2-simplex with linear loss. `test_size` extra flips form the test set.
ProblemInstance gen_coin_sequence(std::size_t rounds, double eps, CoinBias bias, std::uint64_t seed,
                                  std::size_t test_size = 0);

/// (1 - gamma) T free "no coin" points followed by gamma T coin flips at cost 1.
ProblemInstance gen_gamma_sequence(std::size_t rounds, double gamma, double eps, CoinBias bias, std::uint64_t seed,
                                   std::size_t test_size = 0);

struct LinearTaskParams {
  std::size_t dimension = 10;
  std::size_t clusters = 2;  // per class
  double separation = 1.0;
  double noise = 0.5;
  std::size_t rounds = 1000;
  std::size_t test_size = 1000;
  double radius = 10.0;
  LossFamily family = LossFamily::hinge();
};

/// Synthetic binary task: `clusters` Gaussian clusters per class. Cluster k
/// sits at distance separation * (k + 1) / clusters from the true boundary,
/// so cluster 0 of each class is the hardest. Groups are k for the positive
/// class and clusters + k for the negative one. Features are scaled to unit norm.
ProblemInstance gen_linear_task(const LinearTaskParams& params, const CostModel& costs, std::uint64_t seed);

/// Default correlation targets for gen_linear_task: the hardest cluster of each class.
std::vector<int> hardest_groups(std::size_t clusters);

std::vector<Arrival> attach_costs(const Dataset& data, const CostModel& model, std::uint64_t seed);

/// IDX parsing failure, with the byte offset where it was detected.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;  // 2051
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;  // 2049

struct IdxImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major
};

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images);
std::vector<std::uint8_t> serialize_idx_labels(std::span<const std::uint8_t> labels);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Loads an IDX image/label pair keeping only the listed digits, labelled
/// +1 (positive) / -1 (negative); pixels scaled to [0, 1] and each feature
/// vector normalized to unit norm. limit = 0 keeps everything.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 const std::vector<int>& positive_digits = {9, 8}, const std::vector<int>& negative_digits = {1, 4},
                 std::size_t limit = 0);

/// Random split into (first, second) with round(fraction * n) points in first.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double fraction, std::uint64_t seed);

}  // namespace procure
