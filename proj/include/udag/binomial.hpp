#pragma once

#include <cstdint>

#include "udag/rng.hpp"

namespace udag {

// Expected-success count above which binomial() switches from sequential
// inversion to transformed rejection.
inline constexpr double kBinomialInversionLimit = 30.0;

// Exact Binomial(trials, p) variate. Sequential inversion while
// trials*min(p, 1-p) <= kBinomialInversionLimit, otherwise Hoermann's BTRS
// transformed rejection with exact log-factorials.
std::int64_t binomial(Rng& rng, std::int64_t trials, double p);

// Binomial(trials, p) conditioned on being at least 1. Requires trials >= 1
// and p > 0.
std::int64_t binomial_positive(Rng& rng, std::int64_t trials, double p);

// P(Binomial(trials, p) = 0) = (1-p)^trials, evaluated without underflowing
// through pow for p close to 0.
double binomial_zero_probability(std::int64_t trials, double p);

}  // namespace udag
