#pragma once

#include "procure/core.hpp"

namespace procure {

/// Parameters of one round's randomized price law.
///
/// Prices are drawn so that Pr[price >= c] = min{1, delta / (k sqrt(c))}.
/// The law has a continuous part on [c*, c_max) with c* = delta^2 / k^2 and
/// a point mass of min{1, delta / (k sqrt(c_max))} at c_max. k = 0 is the
/// buy-everything regime where the mechanism posts c_max.
struct PricingQuote {
  double delta = 0.0;
  double k = 0.0;
  double c_max = 1.0;
};

/// Data value of arrival z at hypothesis h: the dual norm of the loss gradient.
double data_value(std::span<const double> h, const LossFamily& family, const DataPoint& z, NormKind primal);

double survival(const PricingQuote& quote, double c);

/// Lowest support point delta^2 / k^2, capped at c_max. Throws for k = 0.
double reserve(const PricingQuote& quote);

double price_cdf(const PricingQuote& quote, double price);

/// Inverse-CDF draw from the price law using one uniform u in [0, 1).
double sample_price(const PricingQuote& quote, double u);

/// E[price * 1{price >= c}]: what a posted-price mechanism pays in
/// expectation on an arrival of cost c.
double expected_payment(const PricingQuote& quote, double c);

/// E[c * 1{price >= c}]: the at-cost counterpart.
double expected_cost_payment(const PricingQuote& quote, double c);

}  // namespace procure
