#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "udag/chain.hpp"
#include "udag/stats.hpp"

namespace udag {
namespace {

ChainParams params(int d, std::int64_t n, std::int64_t m = 1, Replacement r = Replacement::with) {
  ChainParams p;
  p.d = d;
  p.n = n;
  p.m = m;
  p.replacement = r;
  return p;
}

TEST(Phases, Defaults) {
  EXPECT_EQ(default_n1(1), 1);
  EXPECT_EQ(default_n1(100), 21);
  EXPECT_EQ(default_n1(1'000'000), 72382);
  EXPECT_EQ(default_n2(10'000, 2), 922);
  EXPECT_DOUBLE_EQ(rising_factorial(3.0, 0), 1.0);
  EXPECT_DOUBLE_EQ(rising_factorial(3.0, 3), 60.0);
}

TEST(Phases, CutoffClamp) {
  ChainParams p = params(2, 5, 3);
  EXPECT_EQ(p.phase1_cutoff(), 3);
  p.n1 = 100;
  EXPECT_EQ(p.phase1_cutoff(), 4);
}

TEST(ChainStep, KOneAbsorbsEverything) {
  Rng rng(1);
  const ChainStep step = chain_step({1, 5, 0, 0}, 2, rng, false);
  EXPECT_EQ(step.z, 5);
  EXPECT_EQ(step.j, 1);
  EXPECT_EQ(step.next.k, 0);
  EXPECT_EQ(step.next.y, 0);
}

TEST(ChainStep, EmptyStateStaysEmpty) {
  Rng rng(2);
  const ChainStep step = chain_step({7, 0, 0, 0}, 3, rng);
  EXPECT_EQ(step.z, 0);
  EXPECT_EQ(step.j, 0);
  EXPECT_EQ(step.next.y, 0);
  EXPECT_EQ(step.next.k, 6);
}

TEST(ChainStep, EmissionAddsD) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const ChainStep step = chain_step({4, 3, 0, 0}, 3, rng);
    EXPECT_EQ(step.next.y, 3 - step.z + 3 * step.j);
    EXPECT_EQ(step.j, step.z > 0 ? 1 : 0);
  }
  EXPECT_THROW(chain_step({0, 1, 0, 0}, 2, rng), ArgumentError);
}

TEST(ChainStep, TwinsAtTwoClearsPairs) {
  Rng rng(4);
  const ChainStep step = chain_step_twins({2, 3, 1, 1}, 2, rng, false);
  EXPECT_EQ(step.z2, 1);
  EXPECT_EQ(step.j, 1);
  EXPECT_EQ(step.next.y2, 0);
  EXPECT_EQ(step.next.y1, 1 - step.z1 + 1);
  EXPECT_EQ(step.next.y, step.next.y1);
  EXPECT_THROW(chain_step_twins({2, 3, 1, 1}, 3, rng), UnsupportedVariant);
}

TEST(ChainParams, TwinsNeedDTwo) {
  Rng rng(5);
  EXPECT_THROW(sample_x(params(3, 10, 3, Replacement::without), rng), UnsupportedVariant);
  EXPECT_THROW(sample_x(params(2, 10, 1, Replacement::without), rng), ConfigError);
  EXPECT_THROW(sample_x(params(1, 10), rng), ConfigError);
}

TEST(RootOccupancy, Examples) {
  Rng rng(6);
  EXPECT_EQ(root_occupancy(0, 5, rng), 0);
  EXPECT_EQ(root_occupancy(9, 1, rng), 1);
  for (int i = 0; i < 100; ++i) {
    const auto r = root_occupancy(3, 4, rng);
    EXPECT_GE(r, 1);
    EXPECT_LE(r, 3);
    EXPECT_EQ(root_occupancy_twins(0, 1, 2, rng), 2);
    EXPECT_GE(root_occupancy_twins(1, 1, 3, rng), 2);
  }
  EXPECT_THROW(root_occupancy_twins(0, 1, 1, rng), ArgumentError);
}

TEST(RootOccupancy, TwoBallsTwoCells) {
  Rng rng(7);
  std::vector<std::int64_t> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(root_occupancy(2, 2, rng));
  EXPECT_GT(chi_square_test(tally(xs), {{1, 0.5}, {2, 0.5}}).p_value, 1e-3);
}

TEST(SampleX, Trivial) {
  Rng rng(8);
  EXPECT_EQ(sample_x(params(2, 1), rng).x, 1);
  EXPECT_EQ(sample_x(params(2, 2), rng).x, 2);
  EXPECT_EQ(sample_x(params(3, 4, 4), rng).x, 1);
}

// Chain samples against exact enumeration of the dag.
TEST(SampleX, MatchesExactLaw) {
  const std::vector<ChainParams> cases = {
      params(2, 3), params(2, 5), params(2, 7, 2), params(3, 5), params(2, 6, 2, Replacement::without),
      params(2, 7, 3, Replacement::without), params(4, 4, 2)};
  int index = 0;
  for (const auto& p : cases) {
    Rng rng(derive_seed(9, static_cast<std::uint64_t>(index++)));
    std::vector<std::int64_t> xs;
    for (int i = 0; i < 200000; ++i) xs.push_back(sample_x(p, rng).x);
    const auto exact = enumerate_exact(p.dag_config()).as_doubles();
    EXPECT_GT(chi_square_test(tally(xs), exact).p_value, 1e-3) << p.d << ' ' << p.n << ' ' << p.m;
  }
}

// Exact E X by dynamic programming over the law of (singles, pairs) crossing
// each gap, for drawing without replacement with d = 2.
double twin_mean_by_dp(std::int64_t n, std::int64_t m) {
  auto binom_pmf = [](std::int64_t y, double q) {
    std::vector<double> pmf(static_cast<std::size_t>(y + 1), 0.0);
    for (std::int64_t z = 0; z <= y; ++z) {
      double c = 1.0;
      for (std::int64_t i = 0; i < z; ++i) c = c * static_cast<double>(y - i) / static_cast<double>(i + 1);
      pmf[static_cast<std::size_t>(z)] = c * std::pow(q, static_cast<double>(z)) * std::pow(1 - q, static_cast<double>(y - z));
    }
    return pmf;
  };
  std::map<std::pair<std::int64_t, std::int64_t>, double> law = {{{0, 1}, 1.0}};
  double mean = 1.0;
  for (std::int64_t k = n - 1; k >= 1; --k) {
    const double kk = static_cast<double>(k);
    std::map<std::pair<std::int64_t, std::int64_t>, double> next;
    for (const auto& [state, weight] : law) {
      const auto [y1, y2] = state;
      const auto p1 = binom_pmf(y1, 1.0 / kk);
      const auto p2 = binom_pmf(y2, std::min(1.0, 2.0 / kk));
      for (std::int64_t z1 = 0; z1 <= y1; ++z1) {
        for (std::int64_t z2 = 0; z2 <= y2; ++z2) {
          const double w = weight * p1[static_cast<std::size_t>(z1)] * p2[static_cast<std::size_t>(z2)];
          if (w == 0.0) continue;
          const int j = z1 + z2 > 0;
          mean += j * w;
          next[{y1 - z1 + z2, y2 - z2 + (k > m ? j : 0)}] += w;
        }
      }
    }
    law = std::move(next);
  }
  return mean;
}

TEST(SampleX, TwinMeanMatchesDynamicProgram) {
  const double exact = twin_mean_by_dp(100, 2);
  EXPECT_NEAR(exact, 20.785428, 1e-6);
  EXPECT_NEAR(twin_mean_by_dp(7, 3), enumerate_exact({2, 7, 3, Replacement::without}).mean(), 1e-12);
  Rng rng(20);
  RunningMoments m;
  for (int i = 0; i < 200000; ++i) m.add(static_cast<double>(sample_x(params(2, 100, 2, Replacement::without), rng).x));
  EXPECT_LT(std::fabs(m.mean() - exact), 4.0 * m.standard_error());
}

TEST(SampleX, StopAtMarksIncomplete) {
  Rng rng(10);
  ChainParams p = params(2, 1000);
  p.stop_at = 500;
  const ChainSample s = sample_x(p, rng);
  EXPECT_FALSE(s.complete);
  EXPECT_EQ(s.boundary.k, 499);
  EXPECT_TRUE(sample_x(params(2, 1000), rng).complete);
}

TEST(SampleX, XiMatchesRecordedPath) {
  // Same seed, same draws: the jump path and its decomposition agree on Xi.
  for (auto r : {Replacement::with, Replacement::without}) {
    const ChainParams p = params(2, 5000, 2, r);
    Rng a(11);
    Rng b(11);
    const ChainSample s = sample_x(p, a);
    const ChainPath path = decompose_path(record_path(p, b));
    EXPECT_DOUBLE_EQ(s.xi, path.xi);
  }
}

// Stepwise and jump paths have the same law: compare X and Y at fixed k.
TEST(RecordPath, StepwiseMatchesJump) {
  for (auto r : {Replacement::with, Replacement::without}) {
    const ChainParams p = params(2, 400, 2, r);
    Rng rng(12);
    RunningMoments x_step, x_jump, y_step, y_jump;
    std::vector<std::int64_t> tail_step, tail_jump;
    for (int i = 0; i < 20000; ++i) {
      const RawPath s = record_path(p, rng, PathMethod::stepwise);
      const RawPath j = record_path(p, rng, PathMethod::jump);
      x_step.add(static_cast<double>(s.x));
      x_jump.add(static_cast<double>(j.x));
      y_step.add(static_cast<double>(s.y[50]));
      y_jump.add(static_cast<double>(j.y[50]));
      tail_step.push_back(std::min<std::int64_t>(s.y[300], 6));
      tail_jump.push_back(std::min<std::int64_t>(j.y[300], 6));
    }
    auto z = [](const RunningMoments& a, const RunningMoments& b) {
      return (a.mean() - b.mean()) /
             std::sqrt(a.variance() / static_cast<double>(a.count()) + b.variance() / static_cast<double>(b.count()));
    };
    EXPECT_LT(std::fabs(z(x_step, x_jump)), 4.0);
    EXPECT_LT(std::fabs(z(y_step, y_jump)), 4.0);
    std::map<std::int64_t, double> pmf;
    for (const auto& [v, c] : tally(tail_jump)) pmf[v] = static_cast<double>(c) / tail_jump.size();
    EXPECT_GT(chi_square_test(tally(tail_step), pmf).p_value, 1e-4);
  }
}

// The chain reproduces the forward dag's gap crossings in law.
TEST(RecordPath, MatchesForwardCrossings) {
  const DagConfig config{2, 200, 1, Replacement::with};
  const ChainParams p = params(2, 200);
  Rng rng(13);
  for (std::size_t k : {10u, 60u, 150u}) {
    RunningMoments forward, chain;
    for (int i = 0; i < 20000; ++i) {
      forward.add(static_cast<double>(gap_crossings(build_dag(config, rng), 200)[k]));
      chain.add(static_cast<double>(record_path(p, rng).y[k]));
    }
    const double se = std::sqrt(forward.variance() / 20000 + chain.variance() / 20000);
    EXPECT_LT(std::fabs(forward.mean() - chain.mean()) / se, 4.0) << k;
  }
}

TEST(RecordPath, Deterministic) {
  const ChainParams p = params(3, 3000, 2);
  Rng a(14);
  Rng b(14);
  const RawPath x = record_path(p, a);
  const RawPath y = record_path(p, b);
  EXPECT_EQ(x.y, y.y);
  EXPECT_EQ(x.z, y.z);
  EXPECT_EQ(x.x, y.x);
}

// Path invariants for random configurations and both path methods.
TEST(DecomposePath, Invariants) {
  Rng meta(15);
  for (int trial = 0; trial < 200; ++trial) {
    const bool twins = uniform_int(meta, 0, 3) == 0;
    const int d = twins ? 2 : static_cast<int>(uniform_int(meta, 2, 4));
    const std::int64_t m = uniform_int(meta, twins ? 2 : 1, 5);
    const std::int64_t n = uniform_int(meta, m + 1, 3000);
    const ChainParams p = params(d, n, m, twins ? Replacement::without : Replacement::with);
    const PathMethod method = trial % 2 ? PathMethod::jump : PathMethod::stepwise;
    Rng rng(derive_seed(16, static_cast<std::uint64_t>(trial)));
    const RawPath raw = record_path(p, rng, method);
    const ChainPath path = decompose_path(raw);
    const auto last = static_cast<std::size_t>(n - 1);

    ASSERT_EQ(path.y[last], d);
    ASSERT_EQ(path.y[0], 0);
    ASSERT_DOUBLE_EQ(path.compensator[last], 0.0);
    ASSERT_DOUBLE_EQ(path.w[last], d * rising_factorial(static_cast<double>(n), d - 1));
    std::int64_t reds = 0;
    for (std::size_t k = 1; k < path.y.size(); ++k) {
      ASSERT_EQ(path.j[k], path.z[k] > 0 ? 1 : 0);
      ASSERT_GE(path.y[k], 0);
      ASSERT_LE(path.compensator[k], path.compensator[k - 1] + 1e-9 * (1 + path.compensator[k]));
      ASSERT_LE(path.drift[k], path.drift[k - 1] + 1e-12);
      ASSERT_NEAR(path.martingale[k], path.w[k] + path.compensator[k], 1e-9 * path.martingale[k]);
      if (static_cast<std::int64_t>(k) > m && k < last) {
        ASSERT_EQ(path.y[k - 1], path.y[k] - path.z[k] + d * path.j[k]);
      }
      if (twins) {
        ASSERT_EQ(raw.y[k], raw.y1[k] + 2 * raw.y2[k]);
      }
      reds += path.j[k];
    }
    ASSERT_EQ(path.x, 1 + reds);
    ASSERT_NEAR(1.0 + path.j_martingale[0] + path.drift[0], static_cast<double>(path.x), 1e-9 * path.x);
    ASSERT_GE(path.n1, m);
    ASSERT_LE(path.n1, n - 1);
  }
}

// W + A is a martingale started from W_{n-1}.
TEST(DecomposePath, MartingaleMean) {
  struct Case {
    int d;
    std::int64_t m;
    Replacement r;
  };
  for (const Case c : {Case{2, 1, Replacement::with}, Case{3, 2, Replacement::with},
                       Case{2, 2, Replacement::without}}) {
    const std::int64_t n = 2000;
    const double start = c.d * rising_factorial(static_cast<double>(n), c.d - 1);
    Rng rng(17);
    RunningMoments m0, mid;
    for (int i = 0; i < 4000; ++i) {
      const ChainPath path = decompose_path(record_path(params(c.d, n, c.m, c.r), rng));
      m0.add(path.martingale[0] / start);
      mid.add(path.martingale[100] / start);
    }
    EXPECT_LT(std::fabs(m0.mean() - 1.0), 4.0 * std::sqrt(m0.variance() / 4000)) << c.d;
    EXPECT_LT(std::fabs(mid.mean() - 1.0), 4.0 * std::sqrt(mid.variance() / 4000)) << c.d;
  }
}

TEST(DecomposePath, CustomCutoff) {
  Rng rng(18);
  const RawPath raw = record_path(params(2, 1000), rng);
  const ChainPath path = decompose_path(raw, 10);
  EXPECT_EQ(path.n1, 10);
  EXPECT_DOUBLE_EQ(path.xi, 11.0 * static_cast<double>(raw.y[10]) / 1000.0);
}

TEST(PathCsv, HeaderAndRows) {
  Rng rng(19);
  const ChainPath path = decompose_path(record_path(params(2, 50), rng));
  std::ostringstream out;
  write_path_csv(out, path);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,Y,Z,J,W,M,A,B,L");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 50);
}

}  // namespace
}  // namespace udag
