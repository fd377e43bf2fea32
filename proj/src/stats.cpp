#include "udag/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "udag/errors.hpp"
#include "udag/special.hpp"

namespace udag {

void RunningMoments::add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double total = static_cast<double>(count_ + other.count_);
  const double delta = other.mean_ - mean_;
  mean_ += delta * static_cast<double>(other.count_) / total;
  m2_ += other.m2_ + delta * delta * static_cast<double>(count_) *
                         static_cast<double>(other.count_) / total;
  count_ += other.count_;
}

double RunningMoments::variance() const {
  return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double RunningMoments::stddev() const { return std::sqrt(variance()); }

double RunningMoments::standard_error() const {
  return count_ < 1 ? 0.0 : stddev() / std::sqrt(static_cast<double>(count_));
}

std::vector<MomentEstimate> estimate_moments(std::span<const double> samples,
                                             std::span<const double> orders, double scale) {
  if (samples.size() < 2) throw ArgumentError("moment estimates need at least two samples");
  std::vector<MomentEstimate> out;
  for (double r : orders) {
    RunningMoments acc;
    for (double x : samples) acc.add(r == 0.0 ? 1.0 : std::pow(x / scale, r));
    out.push_back({r, acc.mean(), acc.standard_error(), acc.count()});
  }
  return out;
}

double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

GofResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                  std::string reference) {
  if (samples.size() < 10) throw ArgumentError("KS test needs at least 10 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  // Walk distinct values; a tied run moves the ECDF in one jump.
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(j) / n - f, f - static_cast<double>(i) / n});
    i = j;
  }
  const double root = std::sqrt(n);
  GofResult result;
  result.reference = std::move(reference);
  result.statistic = d;
  result.p_value = kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
  result.count = static_cast<std::int64_t>(samples.size());
  return result;
}

GofResult chi_square_test(const std::map<std::int64_t, std::uint64_t>& observed,
                          const std::map<std::int64_t, double>& pmf, std::string reference) {
  GofResult result;
  result.reference = std::move(reference);
  std::uint64_t total = 0;
  for (const auto& [value, count] : observed) total += count;
  result.count = static_cast<std::int64_t>(total);
  if (total == 0) throw ArgumentError("chi-square test needs observations");
  for (const auto& [value, count] : observed) {
    auto it = pmf.find(value);
    if (count > 0 && (it == pmf.end() || it->second <= 0.0)) {
      result.statistic = std::numeric_limits<double>::infinity();
      result.p_value = 0.0;
      return result;
    }
  }
  const double n = static_cast<double>(total);
  struct Bin {
    double expected = 0.0;
    double observed = 0.0;
  };
  std::vector<Bin> bins;
  Bin current;
  for (const auto& [value, p] : pmf) {
    if (p <= 0.0) continue;
    current.expected += n * p;
    auto it = observed.find(value);
    if (it != observed.end()) current.observed += static_cast<double>(it->second);
    if (current.expected >= 5.0) {
      bins.push_back(current);
      current = {};
    }
  }
  if (current.expected > 0.0) {
    if (bins.empty()) {
      bins.push_back(current);
    } else {
      bins.back().expected += current.expected;
      bins.back().observed += current.observed;
    }
  }
  double stat = 0.0;
  for (const auto& b : bins) stat += (b.observed - b.expected) * (b.observed - b.expected) / b.expected;
  result.statistic = stat;
  result.dof = static_cast<int>(bins.size()) - 1;
  result.p_value = result.dof > 0 ? gamma_q(0.5 * result.dof, 0.5 * stat) : 1.0;
  return result;
}

std::map<std::int64_t, std::uint64_t> tally(std::span<const std::int64_t> samples) {
  std::map<std::int64_t, std::uint64_t> counts;
  for (auto x : samples) ++counts[x];
  return counts;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw ArgumentError("pearson needs paired samples, n >= 3");
  RunningMoments mx;
  RunningMoments my;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx.add(x[i]);
    my.add(y[i]);
  }
  double cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) cov += (x[i] - mx.mean()) * (y[i] - my.mean());
  const double n = static_cast<double>(x.size());
  cov /= n - 1.0;
  Correlation c;
  c.count = static_cast<std::int64_t>(x.size());
  const double denom = mx.stddev() * my.stddev();
  c.r = denom > 0.0 ? cov / denom : 0.0;
  c.se = std::sqrt(std::max(0.0, 1.0 - c.r * c.r) / (n - 2.0));
  return c;
}

double quantile_grid_dependence(std::span<const double> x, std::span<const double> y, int grid) {
  if (x.size() != y.size() || x.empty()) throw ArgumentError("paired samples required");
  if (grid < 2) throw ArgumentError("grid must be at least 2");
  std::vector<double> sx(x.begin(), x.end());
  std::vector<double> sy(y.begin(), y.end());
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  const std::size_t n = x.size();
  std::vector<double> qx;
  std::vector<double> qy;
  for (int i = 1; i < grid; ++i) {
    const auto idx = std::min(n - 1, static_cast<std::size_t>(static_cast<double>(i) * n / grid));
    qx.push_back(sx[idx]);
    qy.push_back(sy[idx]);
  }
  double worst = 0.0;
  const double nn = static_cast<double>(n);
  for (double a : qx) {
    const double fx = static_cast<double>(std::upper_bound(sx.begin(), sx.end(), a) - sx.begin()) / nn;
    for (double b : qy) {
      const double fy = static_cast<double>(std::upper_bound(sy.begin(), sy.end(), b) - sy.begin()) / nn;
      std::size_t joint = 0;
      for (std::size_t i = 0; i < n; ++i) joint += (x[i] <= a && y[i] <= b) ? 1 : 0;
      worst = std::max(worst, std::fabs(static_cast<double>(joint) / nn - fx * fy));
    }
  }
  return worst;
}

}  // namespace udag
