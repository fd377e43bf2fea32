#include "udag/binomial.hpp"

#include <cmath>

namespace udag {
namespace {

// log(k!) via the reentrant lgamma (std::lgamma writes the global signgam).
double log_factorial(double k) {
  int sign = 0;
  return ::lgamma_r(k + 1.0, &sign);
}

// Requires p <= 0.5 and trials*p <= kBinomialInversionLimit, so q^trials
// stays far above the underflow threshold.
std::int64_t binomial_inversion(Rng& rng, std::int64_t trials, double p) {
  const double q = 1.0 - p;
  const double ratio = p / q;
  const double p0 = std::exp(static_cast<double>(trials) * std::log1p(-p));
  for (;;) {
    double u = uniform01(rng);
    double pmf = p0;
    std::int64_t k = 0;
    while (u > pmf) {
      u -= pmf;
      pmf *= ratio * static_cast<double>(trials - k) / static_cast<double>(k + 1);
      if (++k > trials) break;
    }
    // Only reachable through accumulated rounding in the far tail.
    if (k <= trials) return k;
  }
}

// Hoermann (1993), "The generation of binomial random variates", algorithm
// BTRS. Requires p <= 0.5 and trials*p >= 10.
std::int64_t binomial_btrs(Rng& rng, std::int64_t trials, double p) {
  const double n = static_cast<double>(trials);
  const double q = 1.0 - p;
  const double spq = std::sqrt(n * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = n * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const double mode = std::floor((n + 1.0) * p);
  const double h = log_factorial(mode) + log_factorial(n - mode);

  for (;;) {
    const double u = uniform_open(rng) - 0.5;
    double v = uniform01(rng);
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > n) continue;
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - log_factorial(k) - log_factorial(n - k) + (k - mode) * lpq) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace

double binomial_zero_probability(std::int64_t trials, double p) {
  if (trials <= 0) return 1.0;
  if (p >= 1.0) return 0.0;
  return std::exp(static_cast<double>(trials) * std::log1p(-p));
}

std::int64_t binomial(Rng& rng, std::int64_t trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  const bool flip = p > 0.5;
  const double p_small = flip ? 1.0 - p : p;
  const std::int64_t k =
      static_cast<double>(trials) * p_small <= kBinomialInversionLimit
          ? binomial_inversion(rng, trials, p_small)
          : binomial_btrs(rng, trials, p_small);
  return flip ? trials - k : k;
}

std::int64_t binomial_positive(Rng& rng, std::int64_t trials, double p) {
  if (p >= 1.0) return trials;
  const double p0 = binomial_zero_probability(trials, p);
  if (p0 <= 0.5) {
    // At most two draws on average.
    for (;;) {
      const std::int64_t k = binomial(rng, trials, p);
      if (k > 0) return k;
    }
  }
  // Small mean (p < 0.5 here): invert the zero-truncated pmf directly.
  const double log_q = std::log1p(-p);
  const double positive_mass = -std::expm1(static_cast<double>(trials) * log_q);
  const double ratio = p / (1.0 - p);
  double pmf = static_cast<double>(trials) * p *
               std::exp(static_cast<double>(trials - 1) * log_q) / positive_mass;
  double u = uniform_open(rng);
  std::int64_t k = 1;
  while (u > pmf && k < trials) {
    u -= pmf;
    pmf *= ratio * static_cast<double>(trials - k) / static_cast<double>(k + 1);
    ++k;
  }
  return k;
}

}  // namespace udag
