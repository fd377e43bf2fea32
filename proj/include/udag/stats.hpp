#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace udag {

/// One-pass mean and variance (Welford), mergeable (Chan et al.).
class RunningMoments {
 public:
  void add(double x);
  void merge(const RunningMoments& other);

  std::int64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const;  // sample variance, n - 1 denominator
  double stddev() const;
  double standard_error() const;

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct MomentEstimate {
  double r = 1.0;
  double value = 0.0;
  double se = 0.0;
  std::int64_t count = 0;
};

// Mean of (x / scale)^r for each order, with its Monte Carlo standard error.
// Throws ArgumentError for fewer than two samples.
std::vector<MomentEstimate> estimate_moments(std::span<const double> samples,
                                             std::span<const double> orders, double scale = 1.0);

struct GofResult {
  std::string reference;
  double statistic = 0.0;
  double p_value = 1.0;
  std::int64_t count = 0;
  int dof = 0;  // chi-square only
};

// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

// One-sample KS distance; the p-value uses Stephens' small-sample
// correction. Needs at least 10 samples.
GofResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                  std::string reference = "");

// Pearson chi-square of observed counts against a finite pmf. Adjacent
// support points (in increasing order) are pooled until every bin expects at
// least 5. An observation outside the pmf support gives p = 0.
GofResult chi_square_test(const std::map<std::int64_t, std::uint64_t>& observed,
                          const std::map<std::int64_t, double>& pmf, std::string reference = "");

std::map<std::int64_t, std::uint64_t> tally(std::span<const std::int64_t> samples);

struct Correlation {
  double r = 0.0;
  double se = 0.0;  // sqrt((1 - r^2)/(n - 2))
  std::int64_t count = 0;
};

Correlation pearson(std::span<const double> x, std::span<const double> y);

// max over a grid of marginal quantile pairs (q_i, q_j), i, j = 1..grid-1,
// of |F(x <= q_i, y <= q_j) - F_x(q_i) F_y(q_j)| for the empirical laws.
double quantile_grid_dependence(std::span<const double> x, std::span<const double> y,
                                int grid = 10);

}  // namespace udag
