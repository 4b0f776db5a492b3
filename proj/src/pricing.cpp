#include "procure/pricing.hpp"

#include <algorithm>
#include <cmath>

namespace procure {

namespace {

// Point mass at c_max, min{1, delta / (k sqrt(c_max))}.
double top_mass(const PricingQuote& q) {
  if (q.k <= 0.0) return 1.0;
  return std::min(1.0, q.delta / (q.k * std::sqrt(q.c_max)));
}

}  // namespace

double data_value(std::span<const double> h, const LossFamily& family, const DataPoint& z, NormKind primal) {
  return dual_norm(primal, eval_gradient(family, h, z));
}

double survival(const PricingQuote& quote, double c) {
  if (c > quote.c_max) return 0.0;
  if (quote.k <= 0.0) return 1.0;
  if (quote.delta <= 0.0) return 0.0;
  if (c <= 0.0) return 1.0;
  return std::min(1.0, quote.delta / (quote.k * std::sqrt(c)));
}

double reserve(const PricingQuote& quote) {
  if (quote.k <= 0.0) throw InvalidInput("reserve is undefined for k = 0 (buy-everything regime)");
  const double ratio = quote.delta / quote.k;
  return std::min(quote.c_max, ratio * ratio);
}

double price_cdf(const PricingQuote& quote, double price) {
  if (price >= quote.c_max) return 1.0;
  if (quote.k <= 0.0) return 0.0;
  if (quote.delta <= 0.0) return price >= 0.0 ? 1.0 : 0.0;
  if (price < reserve(quote)) return 0.0;
  return 1.0 - quote.delta / (quote.k * std::sqrt(price));
}

double sample_price(const PricingQuote& quote, double u) {
  if (quote.k <= 0.0) throw InvalidInput("sample_price needs k > 0; the k = 0 regime posts c_max");
  if (quote.delta <= 0.0) return 0.0;
  if (u >= 1.0 - top_mass(quote)) return quote.c_max;
  const double root = quote.delta / (quote.k * (1.0 - u));
  return std::min(quote.c_max, root * root);
}

double expected_payment(const PricingQuote& quote, double c) {
  if (quote.k <= 0.0) return c <= quote.c_max ? quote.c_max : 0.0;
  if (quote.delta <= 0.0 || c > quote.c_max) return 0.0;
  if (top_mass(quote) >= 1.0) return quote.c_max;
  const double floor = std::max(c, reserve(quote));
  return quote.delta / quote.k * (2.0 * std::sqrt(quote.c_max) - std::sqrt(floor));
}

double expected_cost_payment(const PricingQuote& quote, double c) { return c * survival(quote, c); }

}  // namespace procure
