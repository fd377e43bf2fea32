#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "udag/binomial.hpp"
#include "udag/dag.hpp"
#include "udag/rng.hpp"

namespace udag {

// Phase boundaries. n1 = floor(n / log n) ends the branching phase, n2 =
// ceil(n^{(d-1)/d} log n) is the lower end of the flat phase.
std::int64_t default_n1(std::int64_t n);
std::int64_t default_n2(std::int64_t n, int d);

// base (base+1) ... (base+count-1); 1 for count == 0.
double rising_factorial(double base, int count);

struct ChainParams {
  int d = 2;
  std::int64_t n = 1;
  std::int64_t m = 1;
  Replacement replacement = Replacement::with;
  // Phase-I cutoff used for Xi; 0 selects default_n1. Clamped to [m, n-1].
  std::int64_t n1 = 0;
  // Leave vertices below stop_at unresolved (the sample is then marked
  // incomplete). 0 runs the chain to the end.
  std::int64_t stop_at = 0;

  DagConfig dag_config() const { return {d, n, m, replacement}; }
  bool twins() const { return replacement == Replacement::without; }
  // Throws ConfigError, or UnsupportedVariant for d > 2 without replacement.
  void validate() const;
  std::int64_t phase1_cutoff() const;
};

/// Edges crossing the gap between k+1 and k. In the twin variant, y1
/// counts single edges and y2 twin pairs (y = y1 + 2*y2).
struct ChainState {
  std::int64_t k = 0;
  std::int64_t y = 0;
  std::int64_t y1 = 0;
  std::int64_t y2 = 0;
};

ChainState initial_state(const ChainParams& params);

struct ChainStep {
  ChainState next;
  std::int64_t z = 0;   // edges ending at k
  std::int64_t z1 = 0;  // twin variant: single edges ending at k
  std::int64_t z2 = 0;  // twin variant: edges ending at k whose twin lives on
  int j = 0;            // 1 if k is a descendant
};

// One backward step k -> k-1 with Z_k ~ Bin(Y_k, 1/k). A red vertex emits d
// new edges when `emits` (false for roots). Requires state.k >= 1.
ChainStep chain_step(const ChainState& state, int d, Rng& rng, bool emits = true);

// Twin variant for drawing without replacement. Z_{k,1} ~ Bin(Y_{k,1}, 1/k)
// and Z_{k,2} ~ Bin(Y_{k,2}, 2/k) independently. Throws UnsupportedVariant
// unless d == 2.
ChainStep chain_step_twins(const ChainState& state, int d, Rng& rng, bool emits = true);

// Distinct cells hit when y_m balls fall independently into m cells.
std::int64_t root_occupancy(std::int64_t y_m, std::int64_t m, Rng& rng);
// Same, but each of `pairs` twin pairs lands in two distinct cells.
std::int64_t root_occupancy_twins(std::int64_t singles, std::int64_t pairs,
                                  std::int64_t m, Rng& rng);

struct ChainSample {
  std::int64_t x = 1;  // |descendants of n|, partial when !complete
  double xi = std::numeric_limits<double>::quiet_NaN();
  bool complete = true;
  ChainState boundary;  // state where the chain stopped (k = m when complete)
};

struct NullObserver {
  void on_segment(std::int64_t, std::int64_t, const ChainState&) {}
  void on_hit(std::int64_t, std::int64_t) {}
};

namespace detail {

// Largest endpoint among y edges uniform on [1, k]: P(max <= i) = (i/k)^y.
inline std::int64_t max_single_endpoint(Rng& rng, std::int64_t k, std::int64_t y) {
  if (y <= 0) return 0;
  const double scaled =
      static_cast<double>(k) * std::exp(std::log(uniform_open(rng)) / static_cast<double>(y));
  const auto j = static_cast<std::int64_t>(std::ceil(scaled));
  return j < 1 ? 1 : (j > k ? k : j);
}

// Largest endpoint among y2 twin pairs, each a uniform 2-subset of [1, k]:
// P(max <= i) = (i(i-1) / (k(k-1)))^y2.
inline std::int64_t max_pair_endpoint(Rng& rng, std::int64_t k, std::int64_t y2) {
  if (y2 <= 0) return 0;
  const double kk = static_cast<double>(k);
  const double target =
      kk * (kk - 1.0) * std::exp(std::log(uniform_open(rng)) / static_cast<double>(y2));
  auto i = static_cast<std::int64_t>(std::ceil(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * target))));
  auto pairs_below = [](std::int64_t v) {
    return static_cast<double>(v) * static_cast<double>(v - 1);
  };
  while (i < k && pairs_below(i) < target) ++i;
  while (i > 2 && pairs_below(i - 1) >= target) --i;
  return i < 2 ? 2 : (i > k ? k : i);
}

}  // namespace detail

/// Runs the backward chain from k = n-1 down, jumping directly from one red
/// vertex to the next: given Y_k = y, no edge ends in (j, k] with probability
/// (j/k)^y, so the next hit is sampled by inversion and the hit count there
/// is Bin(y, 1/j) conditioned on >= 1. The law of the visited (Y, Z, J) is
/// exactly that of the step-by-step chain.
///
/// The observer sees on_segment(lo, hi, s) meaning Y_i = s.y for all i in
/// [lo, hi], followed by on_hit(lo, z) when lo is red. When `resolve_roots`
/// is false the chain stops at k = m and leaves the occupancy step to the
/// caller (boundary holds the state there).
template <class Observer>
ChainSample run_chain(const ChainParams& params, Rng& rng, Observer& observer,
                      bool resolve_roots = true) {
  params.validate();
  const int d = params.d;
  const std::int64_t n = params.n;
  const std::int64_t m = params.m;
  ChainSample sample;
  if (n <= m) {
    sample.xi = 0.0;
    sample.boundary = {n - 1, 0, 0, 0};
    return sample;
  }
  const std::int64_t n1 = params.phase1_cutoff();
  const std::int64_t lowest = std::max(m + 1, params.stop_at);
  const double xi_scale =
      rising_factorial(static_cast<double>(n1 + 1), d - 1) / std::pow(static_cast<double>(n), d - 1);

  ChainState s = initial_state(params);
  const bool twins = params.twins();
  for (;;) {
    std::int64_t js = 0;
    std::int64_t jp = 0;
    if (twins) {
      js = detail::max_single_endpoint(rng, s.k, s.y1);
      jp = detail::max_pair_endpoint(rng, s.k, s.y2);
    } else {
      js = detail::max_single_endpoint(rng, s.k, s.y);
    }
    const std::int64_t j = std::max(js, jp);
    const std::int64_t lo = j < lowest ? lowest - 1 : j;
    if (lo <= n1 && n1 <= s.k) sample.xi = xi_scale * static_cast<double>(s.y);
    observer.on_segment(lo, s.k, s);
    if (j < lowest) {
      s.k = lowest - 1;
      break;
    }
    std::int64_t z = 0;
    if (twins) {
      const std::int64_t z1 = js == j ? binomial_positive(rng, s.y1, 1.0 / static_cast<double>(j)) : 0;
      const std::int64_t z2 = jp == j ? binomial_positive(rng, s.y2, 2.0 / static_cast<double>(j)) : 0;
      z = z1 + z2;
      s.y1 = s.y1 - z1 + z2;
      s.y2 = s.y2 - z2 + 1;
      s.y = s.y1 + 2 * s.y2;
    } else {
      z = binomial_positive(rng, s.y, 1.0 / static_cast<double>(j));
      s.y = s.y - z + d;
    }
    observer.on_hit(j, z);
    ++sample.x;
    s.k = j - 1;
  }
  sample.boundary = s;
  if (lowest > m + 1) {
    sample.complete = false;
    return sample;
  }
  if (resolve_roots) {
    sample.x += twins ? root_occupancy_twins(s.y1, s.y2, m, rng)
                      : root_occupancy(s.y, m, rng);
  }
  return sample;
}

// X (and Xi) for one replica; O(X) expected time.
ChainSample sample_x(const ChainParams& params, Rng& rng);

/// One full trajectory, index origin 0: y[k] for k = 0..n-1, and z[k], j[k]
/// for k = 1..n-1 (z[0] = j[0] = 0). y1/y2 are filled only for twins.
struct RawPath {
  ChainParams params;
  std::vector<std::int64_t> y, y1, y2, z, j;
  std::int64_t x = 1;
};

enum class PathMethod {
  stepwise,  // chain_step at every k; the reference
  jump,      // run_chain, then fill the skipped runs
};

RawPath record_path(const ChainParams& params, Rng& rng, PathMethod method = PathMethod::jump);

/// Trajectory plus its Doob decompositions W = M - A and X = 1 + L_0 + B_0.
/// All arrays have index origin 0 and length n.
struct ChainPath {
  ChainParams params;
  std::int64_t n1 = 0;
  double xi = 0.0;  // W_{n1} / n^{d-1}
  std::int64_t x = 1;
  std::vector<std::int64_t> y, z, j;
  std::vector<double> w;             // rising(k+1, d-1) * Y_k
  std::vector<double> martingale;    // M_k = W_k + A_k
  std::vector<double> compensator;   // A_k, backwards increasing, A_{n-1} = 0
  std::vector<double> drift;         // B_k = sum_{i>k} P(J_i = 1 | F_i)
  std::vector<double> j_martingale;  // L_k = sum_{i>k} J_i - B_k
};

// n1 == 0 selects the params' phase-I cutoff.
ChainPath decompose_path(const RawPath& raw, std::int64_t n1 = 0);

// CSV with header k,Y,Z,J,W,M,A,B,L; one row per k = 0..n-1.
void write_path_csv(std::ostream& out, const ChainPath& path);

}  // namespace udag
