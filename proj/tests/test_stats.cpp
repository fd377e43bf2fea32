#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>

#include "udag/errors.hpp"
#include "udag/parallel.hpp"
#include "udag/rng.hpp"
#include "udag/stats.hpp"

namespace udag {
namespace {

std::vector<double> uniforms(std::uint64_t seed, int count) {
  Rng rng(seed);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& v : out) v = uniform01(rng);
  return out;
}

TEST(RunningMoments, MatchesTwoPass) {
  const auto xs = uniforms(1, 5000);
  RunningMoments all, left, right;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    all.add(1e6 + xs[i]);
    (i < 1234 ? left : right).add(1e6 + xs[i]);
  }
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / (xs.size() - 1);
  EXPECT_NEAR(all.mean(), 1e6 + mean, 1e-8);
  EXPECT_NEAR(all.variance(), var, 1e-9);
  left.merge(right);
  EXPECT_EQ(left.count(), all.count());
  EXPECT_NEAR(left.mean(), all.mean(), 1e-8);
  EXPECT_NEAR(left.variance(), all.variance(), 1e-9);
  EXPECT_NEAR(all.standard_error(), std::sqrt(var / xs.size()), 1e-12);
}

TEST(RunningMoments, MergeWithEmpty) {
  RunningMoments a, empty;
  a.add(2.0);
  a.add(4.0);
  a.merge(empty);
  EXPECT_EQ(a.count(), 2);
  empty.merge(a);
  EXPECT_DOUBLE_EQ(empty.mean(), 3.0);
  EXPECT_DOUBLE_EQ(empty.variance(), 2.0);
}

TEST(EstimateMoments, Basic) {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> orders = {0.0, 1.0, 2.0};
  const auto est = estimate_moments(xs, orders, 2.0);
  EXPECT_DOUBLE_EQ(est[0].value, 1.0);
  EXPECT_DOUBLE_EQ(est[0].se, 0.0);
  EXPECT_DOUBLE_EQ(est[1].value, 1.25);
  EXPECT_DOUBLE_EQ(est[2].value, (0.25 + 1 + 2.25 + 4) / 4);
  const std::vector<double> one = {1.0};
  EXPECT_THROW(estimate_moments(one, orders), ArgumentError);
}

TEST(Kolmogorov, KnownValues) {
  EXPECT_NEAR(kolmogorov_survival(1.3580986), 0.05, 1e-6);
  EXPECT_NEAR(kolmogorov_survival(1.2238478), 0.10, 1e-6);
  EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
  EXPECT_LT(kolmogorov_survival(5.0), 1e-20);
}

TEST(KsTest, ConstantSample) {
  const std::vector<double> xs(50, 0.3);
  const auto r = ks_test(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_NEAR(r.statistic, 0.7, 1e-15);
  const std::vector<double> ys(50, 0.8);
  EXPECT_NEAR(ks_test(ys, [](double x) { return std::clamp(x, 0.0, 1.0); }).statistic, 0.8, 1e-15);
}

TEST(KsTest, Distance) {
  // Sample {0.1, ..., 1.0} against U(0,1): the step sits exactly on the
  // diagonal at the right ends, so D = 0.1.
  std::vector<double> xs;
  for (int i = 1; i <= 10; ++i) xs.push_back(i / 10.0);
  EXPECT_NEAR(ks_test(xs, [](double x) { return x; }).statistic, 0.1, 1e-12);
  EXPECT_THROW(ks_test({0.1, 0.2}, [](double x) { return x; }), ArgumentError);
}

// Under the null, p-values are roughly uniform: the rejection rate at 5%
// stays near 5%.
TEST(KsTest, NullCalibration) {
  const boost::math::normal normal;
  const auto p_values = serial_map<double>(400, 2, [&](std::int64_t, Rng& rng) {
    std::vector<double> xs(500);
    for (auto& x : xs) x = boost::math::quantile(normal, uniform_open(rng));
    return ks_test(xs, [&](double x) { return boost::math::cdf(normal, x); }).p_value;
  });
  const auto rejected = std::count_if(p_values.begin(), p_values.end(), [](double p) { return p < 0.05; });
  EXPECT_LT(rejected, 40);
  EXPECT_GT(rejected, 5);
  // and a shifted sample is caught
  Rng rng(3);
  std::vector<double> shifted(2000);
  for (auto& x : shifted) x = 0.2 + boost::math::quantile(normal, uniform_open(rng));
  EXPECT_LT(ks_test(shifted, [&](double x) { return boost::math::cdf(normal, x); }).p_value, 1e-6);
}

TEST(ChiSquare, NullCalibration) {
  const std::map<std::int64_t, double> pmf = {{0, 0.5}, {1, 0.3}, {2, 0.15}, {3, 0.04}, {4, 0.01}};
  const auto p_values = serial_map<double>(400, 4, [&](std::int64_t, Rng& rng) {
    std::vector<std::int64_t> xs(1000);
    for (auto& x : xs) {
      double u = uniform01(rng);
      x = 0;
      for (const auto& [v, p] : pmf) {
        x = v;
        if ((u -= p) < 0) break;
      }
    }
    return chi_square_test(tally(xs), pmf).p_value;
  });
  const auto rejected = std::count_if(p_values.begin(), p_values.end(), [](double p) { return p < 0.05; });
  EXPECT_LT(rejected, 40);
  EXPECT_GT(rejected, 5);
}

TEST(ChiSquare, PoolingAndSupport) {
  // 4 and 5 expect < 5 each and are pooled into 3's bin.
  const std::map<std::int64_t, double> pmf = {{1, 0.49}, {2, 0.49}, {3, 0.01}, {4, 0.005}, {5, 0.005}};
  std::map<std::int64_t, std::uint64_t> observed = {{1, 49}, {2, 49}, {3, 1}, {5, 1}};
  const auto r = chi_square_test(observed, pmf);
  EXPECT_EQ(r.count, 100);
  EXPECT_LE(r.dof, 1);
  observed[9] = 1;
  EXPECT_EQ(chi_square_test(observed, pmf).p_value, 0.0);
}

TEST(Tally, Counts) {
  const std::vector<std::int64_t> xs = {3, 1, 3, 3, 2};
  const auto t = tally(xs);
  EXPECT_EQ(t.at(3), 3u);
  EXPECT_EQ(t.at(1), 1u);
  EXPECT_EQ(t.size(), 3u);
}

TEST(Pearson, PerfectAndIndependent) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {2, 4, 6, 8, 10};
  const std::vector<double> z = {10, 8, 6, 4, 2};
  EXPECT_NEAR(pearson(x, y).r, 1.0, 1e-15);
  EXPECT_NEAR(pearson(x, z).r, -1.0, 1e-15);
  const auto a = uniforms(5, 20000);
  const auto b = uniforms(6, 20000);
  const Correlation c = pearson(a, b);
  EXPECT_LT(std::fabs(c.r), 3.0 * c.se);
  EXPECT_NEAR(c.se, 1.0 / std::sqrt(19998.0), 1e-4);
}

TEST(GridDependence, IndependentVersusCoupled) {
  const auto a = uniforms(7, 20000);
  const auto b = uniforms(8, 20000);
  EXPECT_LT(quantile_grid_dependence(a, b), 0.02);
  EXPECT_GT(quantile_grid_dependence(a, a), 0.2);
}

}  // namespace
}  // namespace udag
