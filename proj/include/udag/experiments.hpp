#pragma once

#include <cstdint>
#include <vector>

#include "udag/chain.hpp"
#include "udag/dag.hpp"
#include "udag/stats.hpp"

namespace udag {

struct RunOptions {
  std::uint64_t seed = 7;
  int workers = 1;
};

std::vector<ChainSample> chain_samples(const ChainParams& params, std::int64_t count,
                                       const RunOptions& run);
// |descendants(n)| from a forward build per sample.
std::vector<std::int64_t> forward_samples(const DagConfig& config, std::int64_t count,
                                          const RunOptions& run);

/// What to record along each chain path without storing the path itself.
struct ProbeRequest {
  std::vector<std::int64_t> y_at;  // Y_k at these k (ascending)
  std::vector<std::int64_t> j_at;  // J_k at these k (ascending)
  bool flatness = false;           // sup over [n2, n1] of |W_k/n^{d-1} - Xi|
  std::int64_t n2 = 0;             // 0 selects default_n2
};

struct PathProbe {
  std::int64_t x = 1;
  double xi = 0.0;
  std::vector<std::int64_t> y;
  std::vector<std::uint8_t> j;
  double flat_deviation = 0.0;
};

std::vector<PathProbe> probe_paths(const ChainParams& params, const ProbeRequest& request,
                                   std::int64_t count, const RunOptions& run);

// Ascending unique k = ceil(t n^{(d-1)/d}) for t in [t_lo, t_hi] stepping by
// `step`, clipped to [1, n-1].
std::vector<double> t_grid(double t_lo, double t_hi, double step);
std::int64_t phase3_index(std::int64_t n, int d, double t);

struct Phase3Result {
  std::vector<double> sup_deviation;  // one per path
  double median = 0.0;
  double mean = 0.0;
};

// sup over the t grid of |W_k / n^{d-1} - t^d log(1 + Xi/t^d)|,
// k = ceil(t n^{(d-1)/d}), for each probed path. The probe request must
// contain those k in y_at.
Phase3Result phase3_deviation(const ChainParams& params, const std::vector<double>& ts,
                              const ProbeRequest& request, const std::vector<PathProbe>& paths);

struct DensityRow {
  std::int64_t k = 0;
  double t = 0.0;  // k / sqrt(n)
  double frequency = 0.0;
  double se = 0.0;
  double reference = 0.0;  // p(k/sqrt n)
};

struct DensityResult {
  std::vector<DensityRow> rows;
  double sup_deviation = 0.0;
};

// k = ceil(t sqrt n) for the given t, kept when k <= n1.
std::vector<std::int64_t> density_grid(std::int64_t n, const std::vector<double>& ts);
DensityResult density_table(std::int64_t n, const ProbeRequest& request,
                            const std::vector<PathProbe>& paths);

struct ConditionalResult {
  double mean_deviation = 0.0;  // mean |X/sqrt n - psi(Xi)|
  double mean_scaled_x = 0.0;   // mean X/sqrt n
  double se_scaled_x = 0.0;
  std::int64_t count = 0;
};

// d = 2. For m = 1 the reference is (pi/2) sqrt(Xi); otherwise
// psi_mu(Xi) with mu = m / sqrt n.
ConditionalResult conditional_experiment(std::int64_t n, std::int64_t m, std::int64_t count,
                                         const RunOptions& run);

struct IndependenceResult {
  std::int64_t n = 0;
  Correlation correlation;
  double grid_dependence = 0.0;
  double upsilon_mean = 0.0;  // mean common descendants / sqrt n
  double upsilon_se = 0.0;
  std::int64_t count = 0;
};

// X(n), X(n+1) and their common descendants from one forward build of n+1
// vertices (d = 2, m = 1, with replacement) per joint sample.
IndependenceResult independence_experiment(std::int64_t n, std::int64_t count,
                                           const RunOptions& run);

struct MartingaleResult {
  std::int64_t paths = 0;
  std::int64_t violations = 0;  // all invariant checks combined
  std::vector<std::int64_t> grid;  // geometric in [1, n/2]
  std::vector<double> m_mean;
  std::vector<double> m_se;
  double target = 0.0;          // d n(n+1)...(n+d-2)
  double worst_z = 0.0;         // max |mean - target| / se over the grid
};

MartingaleResult martingale_experiment(const ChainParams& params, std::int64_t count,
                                       const RunOptions& run, int grid_points = 10);

// Invariant violations on one decomposed path (integer recursion, A and B
// monotone and anchored, W <= M, X = 1 + L_0 + B_0).
std::int64_t count_path_violations(const ChainPath& path, double rel_tol = 1e-9);

}  // namespace udag
