#include "procure/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "procure/random.hpp"

namespace procure {

namespace {

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 0.5)) throw InvalidInput("coin bias eps must lie in [0, 1/2)");
}

CoinOutcome flip(Rng& rng, double heads_probability) {
  return CoinOutcome{uniform01(rng) < heads_probability ? 0u : 1u};
}

double heads_probability(double eps, CoinBias bias) { return bias == CoinBias::Heads ? 0.5 + eps : 0.5 - eps; }

Vector gaussian_vector(Rng& rng, std::size_t d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (double& x : v) x = normal(rng);
  return v;
}

void scale_to_unit(Vector& v) {
  const double n = l2_norm(v);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
}

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) throw FormatError("truncated IDX header", bytes.size());
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void expect_magic(std::span<const std::uint8_t> bytes, std::uint32_t magic, const char* what) {
  const std::uint32_t found = read_be32(bytes, 0);
  if (found != magic) {
    throw FormatError(std::string("bad IDX magic for ") + what + ": expected " + std::to_string(magic) + ", found " +
                          std::to_string(found),
                      0);
  }
}

}  // namespace

ProblemInstance gen_coin_sequence(std::size_t rounds, double eps, CoinBias bias, std::uint64_t seed,
                                  std::size_t test_size) {
  return gen_gamma_sequence(rounds, 1.0, eps, bias, seed, test_size);
}

ProblemInstance gen_gamma_sequence(std::size_t rounds, double gamma, double eps, CoinBias bias, std::uint64_t seed,
                                   std::size_t test_size) {
  check_eps(eps);
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidInput("gamma must lie in (0, 1]");
  if (rounds < 1) throw InvalidInput("rounds must be >= 1");

  const auto coins = static_cast<std::size_t>(std::llround(gamma * static_cast<double>(rounds)));
  const double p = heads_probability(eps, bias);
  Rng rng(derive_seed(seed, 0));

  ProblemInstance inst{{}, {}, HypothesisSpace::simplex(2), LossFamily::linear_simplex(), {}, {}};
  inst.arrivals.reserve(rounds);
  for (std::size_t t = 0; t < rounds - coins; ++t) {
    inst.arrivals.push_back(Arrival{0.0, NullPoint{}});
    inst.groups.push_back(-1);
  }
  for (std::size_t t = 0; t < coins; ++t) {
    const CoinOutcome c = flip(rng, p);
    inst.arrivals.push_back(Arrival{1.0, c});
    inst.groups.push_back(static_cast<int>(c.index));
  }
  Rng test_rng(derive_seed(seed, 1));
  for (std::size_t i = 0; i < test_size; ++i) inst.test_set.push_back(flip(test_rng, p));

  inst.truth = {{"rounds", static_cast<double>(rounds)},
                {"gamma", gamma},
                {"coin_points", static_cast<double>(coins)},
                {"eps", eps},
                {"heads_probability", p}};
  return inst;
}

std::vector<int> hardest_groups(std::size_t clusters) { return {0, static_cast<int>(clusters)}; }

ProblemInstance gen_linear_task(const LinearTaskParams& params, const CostModel& costs, std::uint64_t seed) {
  const std::size_t d = params.dimension;
  if (d < 2) throw InvalidInput("linear task needs dimension >= 2");
  if (params.clusters < 1) throw InvalidInput("linear task needs at least one cluster per class");
  if (params.rounds < 1) throw InvalidInput("rounds must be >= 1");

  Rng rng(derive_seed(seed, 0));
  Vector normal = gaussian_vector(rng, d);
  scale_to_unit(normal);

  // Cluster centers: y * m_k * normal + an orthogonal unit offset.
  const std::size_t groups = 2 * params.clusters;
  std::vector<Vector> centers(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const bool positive = g < params.clusters;
    const std::size_t k = g % params.clusters;
    Vector offset = gaussian_vector(rng, d);
    const double along = dot(offset, normal);
    for (std::size_t i = 0; i < d; ++i) offset[i] -= along * normal[i];
    scale_to_unit(offset);
    const double margin = params.separation * static_cast<double>(k + 1) / static_cast<double>(params.clusters);
    Vector c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = (positive ? margin : -margin) * normal[i] + offset[i];
    centers[g] = std::move(c);
  }

  const double sigma = params.noise / std::sqrt(static_cast<double>(d));
  auto draw = [&](Rng& r, int& group) {
    std::uniform_int_distribution<std::size_t> pick(0, groups - 1);
    const std::size_t g = pick(r);
    Vector x = gaussian_vector(r, d);
    for (std::size_t i = 0; i < d; ++i) x[i] = centers[g][i] + sigma * x[i];
    scale_to_unit(x);
    group = static_cast<int>(g);
    return LabeledPoint{std::move(x), g < params.clusters ? 1 : -1};
  };

  Dataset train;
  Rng train_rng(derive_seed(seed, 1));
  for (std::size_t t = 0; t < params.rounds; ++t) {
    int g = 0;
    train.points.emplace_back(draw(train_rng, g));
    train.groups.push_back(g);
  }

  ProblemInstance inst{{}, {}, HypothesisSpace::l2_ball(d, params.radius), params.family, train.groups, {}};
  inst.arrivals = attach_costs(train, costs, derive_seed(seed, 2));
  Rng test_rng(derive_seed(seed, 3));
  for (std::size_t i = 0; i < params.test_size; ++i) {
    int g = 0;
    inst.test_set.emplace_back(draw(test_rng, g));
  }
  inst.truth = {{"dimension", static_cast<double>(d)},
                {"clusters", static_cast<double>(params.clusters)},
                {"separation", params.separation},
                {"noise", params.noise}};
  for (std::size_t i = 0; i < d; ++i) inst.truth["normal_" + std::to_string(i)] = normal[i];
  return inst;
}

std::vector<Arrival> attach_costs(const Dataset& data, const CostModel& model, std::uint64_t seed) {
  if (data.groups.size() != data.points.size()) throw InvalidInput("dataset groups and points differ in length");
  Rng rng(derive_seed(seed, 0));
  std::vector<Arrival> out;
  out.reserve(data.size());

  if (const auto* m = std::get_if<ConstantCost>(&model)) {
    if (m->cost < 0.0) throw InvalidConfig("costs must be nonnegative");
    for (const auto& p : data.points) out.push_back(Arrival{m->cost, p});
  } else if (const auto* m = std::get_if<UniformCost>(&model)) {
    if (m->lo < 0.0 || m->hi < m->lo) throw InvalidConfig("uniform cost range must satisfy 0 <= lo <= hi");
    for (const auto& p : data.points) out.push_back(Arrival{m->lo + (m->hi - m->lo) * uniform01(rng), p});
  } else if (const auto* m = std::get_if<TwoPointIndependentCost>(&model)) {
    if (m->p_high < 0.0 || m->p_high > 1.0) throw InvalidConfig("p_high must lie in [0, 1]");
    for (const auto& p : data.points) out.push_back(Arrival{uniform01(rng) < m->p_high ? m->high_cost : 0.0, p});
  } else {
    const auto& c = std::get<TwoPointCorrelatedCost>(model);
    if (c.p_high < 0.0 || c.p_high > 1.0) throw InvalidConfig("p_high must lie in [0, 1]");
    auto targeted = [&](int g) { return std::find(c.target_groups.begin(), c.target_groups.end(), g) != c.target_groups.end(); };
    const auto hits = std::count_if(data.groups.begin(), data.groups.end(), targeted);
    const double fraction = data.size() == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(data.size());
    double within = 0.0;
    if (c.p_high > 0.0) {
      if (fraction <= 0.0 || c.p_high > fraction) {
        throw InvalidConfig("target groups cover a fraction " + std::to_string(fraction) +
                            " of the data, too small for marginal p_high " + std::to_string(c.p_high));
      }
      within = c.p_high / fraction;
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      // One draw per point regardless of group keeps streams aligned across models.
      const double u = uniform01(rng);
      const bool high = targeted(data.groups[i]) && u < within;
      out.push_back(Arrival{high ? c.high_cost : 0.0, data.points[i]});
    }
  }
  return out;
}

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes) {
  expect_magic(bytes, kIdxImagesMagic, "images");
  IdxImages img;
  img.count = read_be32(bytes, 4);
  img.rows = read_be32(bytes, 8);
  img.cols = read_be32(bytes, 12);
  const std::size_t expected = std::size_t{img.count} * img.rows * img.cols;
  if (bytes.size() - 16 < expected) {
    throw FormatError("truncated IDX image data: expected " + std::to_string(expected) + " pixel bytes",
                      bytes.size());
  }
  if (bytes.size() - 16 > expected) throw FormatError("trailing bytes after IDX image data", 16 + expected);
  img.pixels.assign(bytes.begin() + 16, bytes.end());
  return img;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  expect_magic(bytes, kIdxLabelsMagic, "labels");
  const std::uint32_t count = read_be32(bytes, 4);
  if (bytes.size() - 8 < count) {
    throw FormatError("truncated IDX label data: expected " + std::to_string(count) + " labels", bytes.size());
  }
  if (bytes.size() - 8 > count) throw FormatError("trailing bytes after IDX label data", 8 + std::size_t{count});
  return {bytes.begin() + 8, bytes.end()};
}

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  write_be32(out, kIdxImagesMagic);
  write_be32(out, images.count);
  write_be32(out, images.rows);
  write_be32(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> serialize_idx_labels(std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  write_be32(out, kIdxLabelsMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 const std::vector<int>& positive_digits, const std::vector<int>& negative_digits, std::size_t limit) {
  const IdxImages img = parse_idx_images(read_file_bytes(images));
  const std::vector<std::uint8_t> lab = parse_idx_labels(read_file_bytes(labels));
  if (lab.size() != img.count) {
    throw FormatError("image count " + std::to_string(img.count) + " does not match label count " +
                          std::to_string(lab.size()),
                      4);
  }
  const auto contains = [](const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); };
  const std::size_t pixels = std::size_t{img.rows} * img.cols;

  Dataset out;
  for (std::size_t i = 0; i < img.count; ++i) {
    if (limit != 0 && out.size() >= limit) break;
    const int digit = lab[i];
    int label = 0;
    if (contains(positive_digits, digit)) {
      label = 1;
    } else if (contains(negative_digits, digit)) {
      label = -1;
    } else {
      continue;
    }
    Vector x(pixels);
    for (std::size_t j = 0; j < pixels; ++j) x[j] = img.pixels[i * pixels + j] / 255.0;
    scale_to_unit(x);
    out.points.emplace_back(LabeledPoint{std::move(x), label});
    out.groups.push_back(digit);
  }
  return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidInput("split fraction must lie in [0, 1]");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0));
  // Fisher-Yates with our own uniform draws so the split is portable.
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  const auto first_size = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(data.size())));
  std::pair<Dataset, Dataset> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    Dataset& dst = i < first_size ? out.first : out.second;
    dst.points.push_back(data.points[order[i]]);
    dst.groups.push_back(data.groups[order[i]]);
  }
  return out;
}

}  // namespace procure
