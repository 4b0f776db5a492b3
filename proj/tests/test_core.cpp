#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "procure/core.hpp"

using namespace procure;

namespace {

Vector random_vector(std::mt19937_64& rng, std::size_t d, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(d);
  for (auto& x : v) x = scale * n(rng);
  return v;
}

Vector random_in_ball(std::mt19937_64& rng, std::size_t d, double radius) {
  Vector v = random_vector(rng, d, 1.0);
  const double r = radius * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const double n = l2_norm(v);
  for (auto& x : v) x *= r / n;
  return v;
}

Vector random_in_simplex(std::mt19937_64& rng, std::size_t d) {
  std::exponential_distribution<double> e(1.0);
  Vector v(d);
  double total = 0.0;
  for (auto& x : v) total += x = e(rng);
  for (auto& x : v) x /= total;
  return v;
}

double distance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double l1(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double linf(const Vector& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

TEST_CASE("hinge at the origin") {
  const LabeledPoint p{{0.6, -0.8}, -1};
  CHECK(eval_loss(LossFamily::hinge(), Vector{0.0, 0.0}, p) == 1.0);
  const Vector g = eval_gradient(LossFamily::hinge(), Vector{0.0, 0.0}, p);
  CHECK(g[0] == doctest::Approx(0.6));
  CHECK(g[1] == doctest::Approx(-0.8));
}

TEST_CASE("hinge is flat past the margin") {
  const LabeledPoint p{{1.0, 0.0}, 1};
  const Vector h{2.0, 5.0};
  CHECK(eval_loss(LossFamily::hinge(), h, p) == 0.0);
  const Vector g = eval_gradient(LossFamily::hinge(), h, p);
  CHECK(g == Vector{0.0, 0.0});
}

TEST_CASE("linear simplex loss and gradient") {
  const auto f = LossFamily::linear_simplex();
  CHECK(eval_loss(f, Vector{1.0, 0.0}, CoinOutcome{0}) == 0.0);
  CHECK(eval_loss(f, Vector{0.5, 0.5}, CoinOutcome{0}) == 0.5);
  CHECK(eval_loss(f, Vector{0.5, 0.5}, CoinOutcome{1}) == 0.5);
  CHECK(eval_gradient(f, Vector{0.2, 0.3, 0.5}, CoinOutcome{1}) == Vector{0.0, -1.0, 0.0});
}

TEST_CASE("null points cost one and carry no gradient") {
  for (auto f : {LossFamily::hinge(), LossFamily::logistic(), LossFamily::linear_simplex()}) {
    CHECK(eval_loss(f, Vector{0.3, 0.7}, NullPoint{}) == 1.0);
    CHECK(eval_gradient(f, Vector{0.3, 0.7}, NullPoint{}) == Vector{0.0, 0.0});
  }
}

TEST_CASE("logistic stays finite for large margins") {
  const LabeledPoint p{{1.0}, 1};
  CHECK(std::isfinite(eval_loss(LossFamily::logistic(), Vector{-800.0}, p)));
  CHECK(eval_loss(LossFamily::logistic(), Vector{-800.0}, p) == doctest::Approx(800.0));
  CHECK(eval_loss(LossFamily::logistic(), Vector{800.0}, p) >= 0.0);
  CHECK(eval_loss(LossFamily::logistic(), Vector{0.0}, p) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("norms") {
  CHECK(dual_norm(NormKind::L2, Vector{3.0, 4.0}) == 5.0);
  CHECK(dual_norm(NormKind::L1, Vector{-1.0, 0.2}) == 1.0);
  CHECK(dual_norm(NormKind::L2, Vector{0.0, 0.0}) == 0.0);
  CHECK(dual_norm(NormKind::L1, Vector{0.0, 0.0}) == 0.0);
  CHECK(primal_norm(NormKind::L1, Vector{-1.0, 0.2}) == doctest::Approx(1.2));
}

TEST_CASE("projection examples") {
  CHECK(project(HypothesisSpace::l2_ball(2, 1.0), Vector{0.0, 2.0}).coords == Vector{0.0, 1.0});
  CHECK(project(HypothesisSpace::l2_ball(2, 10.0), Vector{3.0, 4.0}).coords == Vector{3.0, 4.0});
  CHECK(project(HypothesisSpace::simplex(2), Vector{0.5, 0.5}).coords == Vector{0.5, 0.5});
  const Hypothesis p = project(HypothesisSpace::simplex(3), Vector{2.0, 0.0, -1.0});
  CHECK(p.coords == Vector{1.0, 0.0, 0.0});
}

TEST_CASE("space constants") {
  CHECK(HypothesisSpace::l2_ball(3, 10.0).beta() == 50.0);
  CHECK(HypothesisSpace::simplex(2).beta() == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(HypothesisSpace::l2_ball(0, 1.0), InvalidConfig);
  CHECK_THROWS_AS(HypothesisSpace::l2_ball(2, 0.0), InvalidConfig);
  CHECK_THROWS_AS(HypothesisSpace::simplex(0), InvalidConfig);
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(eval_loss(LossFamily::hinge(), Vector{1.0}, LabeledPoint{{1.0, 2.0}, 1}), InvalidInput);
  CHECK_THROWS_AS(eval_loss(LossFamily::linear_simplex(), Vector{1.0, 0.0}, CoinOutcome{2}), InvalidInput);
  CHECK_THROWS_AS(project(HypothesisSpace::simplex(3), Vector{1.0}), InvalidInput);
}

TEST_CASE("losses are 1-Lipschitz on their spaces") {
  std::mt19937_64 rng(5);
  const double radius = 3.0;
  for (auto f : {LossFamily::hinge(), LossFamily::logistic(), LossFamily::squared_hinge(radius)}) {
    for (int i = 0; i < 1000; ++i) {
      Vector x = random_vector(rng, 4, 1.0);
      normalize_features(x);
      const LabeledPoint z{x, i % 2 == 0 ? 1 : -1};
      const Vector a = random_in_ball(rng, 4, radius);
      const Vector b = random_in_ball(rng, 4, radius);
      CHECK(std::abs(eval_loss(f, a, z) - eval_loss(f, b, z)) <= distance(a, b) + 1e-9);
    }
  }
  for (int i = 0; i < 1000; ++i) {
    const Vector a = random_in_simplex(rng, 3);
    const Vector b = random_in_simplex(rng, 3);
    const auto z = CoinOutcome{static_cast<std::size_t>(i % 3)};
    const auto f = LossFamily::linear_simplex();
    CHECK(std::abs(eval_loss(f, a, z) - eval_loss(f, b, z)) <= l1(Vector{a[0] - b[0], a[1] - b[1], a[2] - b[2]}) + 1e-9);
  }
}

TEST_CASE("gradients match central differences away from kinks") {
  std::mt19937_64 rng(9);
  const double step = 1e-5;
  for (auto f : {LossFamily::hinge(), LossFamily::logistic(), LossFamily::squared_hinge(2.0)}) {
    int tested = 0;
    while (tested < 200) {
      Vector x = random_vector(rng, 3, 1.0);
      normalize_features(x);
      const LabeledPoint z{x, tested % 2 == 0 ? 1 : -1};
      Vector h = random_in_ball(rng, 3, 2.0);
      if (std::abs(1.0 - z.label * dot(h, x)) < 1e-3) continue;
      const Vector g = eval_gradient(f, h, z);
      for (std::size_t i = 0; i < 3; ++i) {
        Vector up = h, down = h;
        up[i] += step;
        down[i] -= step;
        const double numeric = (eval_loss(f, up, z) - eval_loss(f, down, z)) / (2.0 * step);
        CHECK(std::abs(numeric - g[i]) <= 1e-4);
      }
      ++tested;
    }
  }
  const Vector h = random_in_simplex(rng, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    Vector up = h, down = h;
    up[i] += step;
    down[i] -= step;
    const auto f = LossFamily::linear_simplex();
    const double numeric = (eval_loss(f, up, CoinOutcome{2}) - eval_loss(f, down, CoinOutcome{2})) / (2.0 * step);
    CHECK(std::abs(numeric - eval_gradient(f, h, CoinOutcome{2})[i]) <= 1e-4);
  }
}

TEST_CASE("projection is idempotent and non-expansive toward the set") {
  std::mt19937_64 rng(13);
  const auto ball = HypothesisSpace::l2_ball(5, 2.0);
  const auto simplex = HypothesisSpace::simplex(5);
  for (int i = 0; i < 50; ++i) {
    const Vector v = random_vector(rng, 5, 3.0);
    for (const auto& space : {ball, simplex}) {
      const Hypothesis p = project(space, v);
      CHECK(space.contains(p.coords));
      const Hypothesis again = project(space, p.coords);
      for (std::size_t k = 0; k < 5; ++k) CHECK(again[k] == doctest::Approx(p[k]).epsilon(1e-12));
      for (int j = 0; j < 100; ++j) {
        const Vector inside = space.kind() == SpaceKind::L2Ball ? random_in_ball(rng, 5, 2.0) : random_in_simplex(rng, 5);
        CHECK(distance(p.coords, inside) <= distance(v, inside) + 1e-12);
      }
    }
  }
}

TEST_CASE("Hoelder inequality for both norm pairs") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const Vector a = random_vector(rng, 6, 2.0);
    const Vector b = random_vector(rng, 6, 2.0);
    CHECK(std::abs(dot(a, b)) <= primal_norm(NormKind::L2, a) * dual_norm(NormKind::L2, b) + 1e-12);
    CHECK(std::abs(dot(a, b)) <= primal_norm(NormKind::L1, a) * dual_norm(NormKind::L1, b) + 1e-12);
    CHECK(dual_norm(NormKind::L1, b) == linf(b));
  }
}

TEST_CASE("feature normalization only shrinks") {
  Vector big{3.0, 4.0};
  normalize_features(big);
  CHECK(l2_norm(big) == doctest::Approx(1.0));
  Vector small{0.3, 0.4};
  normalize_features(small);
  CHECK(small == Vector{0.3, 0.4});
}

TEST_CASE("zero-one counts ties as errors") {
  CHECK(zero_one(Vector{0.0, 0.0}, LabeledPoint{{1.0, 0.0}, 1}) == 1.0);
  CHECK(zero_one(Vector{1.0, 0.0}, LabeledPoint{{1.0, 0.0}, 1}) == 0.0);
  CHECK(zero_one(Vector{1.0, 0.0}, LabeledPoint{{1.0, 0.0}, -1}) == 1.0);
  CHECK(zero_one(Vector{0.5, 0.5}, CoinOutcome{0}) == 1.0);
  CHECK(zero_one(Vector{0.6, 0.4}, CoinOutcome{0}) == 0.0);
  CHECK(zero_one(Vector{0.6, 0.4}, NullPoint{}) == 1.0);
}

TEST_CASE("loss names round-trip") {
  for (auto k : {LossKind::Hinge, LossKind::Logistic, LossKind::SquaredHinge, LossKind::LinearSimplex}) {
    CHECK(loss_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(loss_kind_from_string("cubic"), InvalidConfig);
}
