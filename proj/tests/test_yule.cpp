#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "udag/errors.hpp"
#include "udag/limits.hpp"
#include "udag/stats.hpp"
#include "udag/yule.hpp"

namespace udag {
namespace {

double z_score(const RunningMoments& m, double target) {
  return (m.mean() - target) / m.standard_error();
}

TEST(SimulateYule, ZeroHorizon) {
  Rng rng(1);
  for (int d : {2, 3, 5}) {
    const YuleTree tree = simulate_yule(d, 0.0, rng);
    EXPECT_TRUE(tree.events.empty());
    EXPECT_EQ(tree.final_count(), d);
    EXPECT_EQ(tree.count_at(0.0), d);
  }
  EXPECT_THROW(simulate_yule(2, -1.0, rng), ArgumentError);
  EXPECT_THROW(simulate_yule(1, 1.0, rng), ArgumentError);
}

TEST(SimulateYule, Bookkeeping) {
  Rng rng(2);
  for (int d : {2, 3, 4}) {
    const YuleTree tree = simulate_yule(d, 2.0, rng);
    double previous = 0.0;
    for (std::size_t i = 0; i < tree.events.size(); ++i) {
      const auto& e = tree.events[i];
      ASSERT_GT(e.time, previous);
      ASSERT_LE(e.time, 2.0);
      ASSERT_LT(e.parent, static_cast<std::int64_t>(i));
      ASSERT_GE(e.parent, -1);
      if (e.parent >= 0) ASSERT_GT(e.time, tree.events[static_cast<std::size_t>(e.parent)].time);
      ASSERT_EQ(tree.count_at(e.time), d + static_cast<std::int64_t>(i + 1) * (d - 1));
      previous = e.time;
    }
    EXPECT_EQ(tree.count_at(2.0), tree.final_count());
  }
}

TEST(SimulateYule, TargetCount) {
  Rng rng(3);
  const YuleTree tree = simulate_yule_to_count(3, 101, rng);
  EXPECT_GE(tree.final_count(), 101);
  EXPECT_LT(tree.final_count() - 2, 101);
  EXPECT_EQ(simulate_yule_to_count(2, 2, rng).events.size(), 0u);
  EXPECT_THROW(simulate_yule_to_count(3, 2, rng), ArgumentError);
  EXPECT_THROW(simulate_yule_to_count(2, 4, rng, 5), ArgumentError);
}

TEST(SimulateYule, SingleAncestorIsGeometric) {
  Rng rng(4);
  std::vector<std::int64_t> counts;
  std::int64_t alone = 0;
  const int runs = 1'000'000;
  for (int i = 0; i < runs; ++i) {
    counts.push_back(simulate_yule(2, 1.0, rng, 1).final_count());
    alone += counts.back() == 1;
  }
  const double p = std::exp(-1.0);
  EXPECT_NEAR(static_cast<double>(alone) / runs, p, 3.0 * std::sqrt(p * (1 - p) / runs));
  std::map<std::int64_t, double> pmf;
  for (std::int64_t k = 1; k <= 60; ++k) pmf[k] = p * std::pow(1 - p, static_cast<double>(k - 1));
  EXPECT_GT(chi_square_test(tally(counts), pmf).p_value, 1e-3);
}

TEST(SimulateYule, MeanGrowth) {
  Rng rng(5);
  for (auto [d, t] : {std::pair{2, 2.0}, std::pair{3, 1.0}}) {
    RunningMoments m;
    for (int i = 0; i < 40000; ++i) m.add(static_cast<double>(simulate_yule(d, t, rng).final_count()));
    EXPECT_LT(std::fabs(z_score(m, d * std::exp((d - 1) * t))), 3.0) << d;
  }
}

// (Y_t - d)/(d-1) ~ NegBin(d/(d-1), e^{-(d-1)t}) by its pgf at five points.
TEST(SimulateYule, NegativeBinomialPgf) {
  Rng rng(6);
  for (auto [d, t] : {std::pair{2, 1.0}, std::pair{3, 0.6}}) {
    const double p = std::exp(-(d - 1) * t);
    const double r = d / (d - 1.0);
    const std::vector<double> points = {0.1, 0.3, 0.5, 0.7, 0.9};
    std::vector<RunningMoments> pgf(points.size());
    for (int i = 0; i < 100000; ++i) {
      const auto failures = (simulate_yule(d, t, rng).final_count() - d) / (d - 1);
      for (std::size_t j = 0; j < points.size(); ++j)
        pgf[j].add(std::pow(points[j], static_cast<double>(failures)));
    }
    for (std::size_t j = 0; j < points.size(); ++j) {
      const double want = std::pow(p / (1.0 - (1.0 - p) * points[j]), r);
      EXPECT_LT(std::fabs(z_score(pgf[j], want)), 3.0) << d << ' ' << points[j];
    }
  }
}

TEST(TimeChange, Structure) {
  Rng rng(7);
  const YuleTree tree = simulate_yule(2, 3.0, rng);
  const TimeChangedTree tc = time_change(tree);
  ASSERT_EQ(tc.x.size(), tree.events.size() + 1);
  EXPECT_EQ(tc.x[0], 1.0);
  EXPECT_EQ(tc.parent[0], -1);
  EXPECT_EQ(tc.count_at(1.0), 2);
  EXPECT_NEAR(tc.lowest, std::exp(-3.0), 1e-15);
  for (std::size_t i = 1; i < tc.x.size(); ++i) {
    const double u = tc.x[i] / tc.x[static_cast<std::size_t>(tc.parent[i])];
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_EQ(tc.count_at(tc.x[i]), tree.count_at(tree.events[i - 1].time));
  }
  for (double x : {0.9, 0.5, 0.2, 0.06}) EXPECT_EQ(tc.count_at(x), tree.count_at(-std::log(x)));
}

TEST(TimeChange, MeanAtTenth) {
  Rng rng(8);
  RunningMoments m;
  for (int i = 0; i < 40000; ++i) {
    const TimeChangedTree tc = time_change(simulate_yule(2, -std::log(0.1), rng));
    m.add(static_cast<double>(tc.count_at(0.1)));
  }
  EXPECT_LT(std::fabs(z_score(m, 20.0)), 3.0);
}

TEST(YuleLimitSample, Examples) {
  Rng rng(9);
  EXPECT_EQ(yule_limit_sample(2, 0.0, rng), 2.0);
  EXPECT_EQ(yule_limit_sample(4, 0.0, rng), 4.0);
  EXPECT_THROW(yule_limit_sample(2, -1.0, rng), ArgumentError);
  RunningMoments m;
  for (int i = 0; i < 100000; ++i) m.add(yule_limit_sample(3, 10.0, rng));
  EXPECT_LT(std::fabs(z_score(m, 3.0)), 3.0);
}

TEST(YuleLimitSample, MatchesSimulationAtFiniteTime) {
  Rng rng(10);
  RunningMoments direct, simulated;
  for (int i = 0; i < 40000; ++i) {
    direct.add(yule_limit_sample(2, 1.5, rng));
    simulated.add(std::exp(-1.5) * static_cast<double>(simulate_yule(2, 1.5, rng).final_count()));
  }
  const double se = std::hypot(direct.standard_error(), simulated.standard_error());
  EXPECT_LT(std::fabs(direct.mean() - simulated.mean()) / se, 4.0);
}

TEST(YuleLimitSample, ConvergesToGamma) {
  Rng rng(11);
  auto ks_at = [&](double t) {
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(yule_limit_sample(2, t, rng));
    return ks_test(xs, [](double x) { return xi_limit_cdf(2, x); }).statistic;
  };
  EXPECT_LT(ks_at(12.0), ks_at(4.0));
}

TEST(CoupledPrefix, FloorBoundsAndDepthOne) {
  Rng rng(12);
  for (std::int64_t n : {100, 10'000, 1'000'000}) {
    for (int run = 0; run < 20; ++run) {
      const CouplingReport report = coupled_prefix(n, 2, rng);
      EXPECT_EQ(report.floor_bound_violations, 0);
      EXPECT_EQ(report.vertices[0].label, n);
      for (const auto& v : report.vertices) {
        if (v.parent < 0) continue;
        const auto& parent = report.vertices[static_cast<std::size_t>(v.parent)];
        ASSERT_LT(v.label, parent.label);
        ASSERT_LT(v.x, parent.x);
        ASSERT_EQ(v.depth, parent.depth + 1);
        if (v.depth == 1) ASSERT_LE(std::fabs(v.x - static_cast<double>(v.label) / n), 1.0 / n);
      }
    }
  }
  EXPECT_THROW(coupled_prefix(1, 2, rng), ArgumentError);
}

TEST(CoupledPrefix, CollisionsBecomeRare) {
  Rng rng(13);
  auto rate = [&](std::int64_t n) {
    int hits = 0;
    for (int i = 0; i < 2000; ++i) hits += coupled_prefix(n, 2, rng).collision;
    return hits / 2000.0;
  };
  const double small = rate(1000);
  const double large = rate(100'000);
  EXPECT_LT(large, small);
}

TEST(YuleCsv, Header) {
  Rng rng(14);
  const YuleTree tree = simulate_yule(2, 1.0, rng);
  std::ostringstream out;
  write_yule_csv(out, tree);
  EXPECT_EQ(out.str().substr(0, 18), "event,time,parent\n");
}

}  // namespace
}  // namespace udag
