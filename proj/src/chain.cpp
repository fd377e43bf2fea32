#include "udag/chain.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "udag/errors.hpp"

namespace udag {

std::int64_t default_n1(std::int64_t n) {
  if (n < 3) return 1;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                       std::floor(static_cast<double>(n) / std::log(static_cast<double>(n)))));
}

std::int64_t default_n2(std::int64_t n, int d) {
  if (n < 3) return 1;
  const double nn = static_cast<double>(n);
  return static_cast<std::int64_t>(
      std::ceil(std::pow(nn, static_cast<double>(d - 1) / d) * std::log(nn)));
}

double rising_factorial(double base, int count) {
  double product = 1.0;
  for (int i = 0; i < count; ++i) product *= base + i;
  return product;
}

void ChainParams::validate() const {
  dag_config().validate();
  if (replacement == Replacement::without && d != 2) {
    throw UnsupportedVariant("the backward twin chain is defined for d = 2 only; "
                             "use the forward sampler for d > 2 without replacement");
  }
  if (n1 < 0 || stop_at < 0) throw ConfigError("n1 and stop_at must be non-negative");
}

std::int64_t ChainParams::phase1_cutoff() const {
  const std::int64_t raw = n1 > 0 ? n1 : default_n1(n);
  return std::clamp(raw, m, std::max(m, n - 1));
}

ChainState initial_state(const ChainParams& params) {
  ChainState s;
  s.k = params.n - 1;
  if (params.n <= params.m) return s;
  if (params.twins()) {
    s.y1 = 0;
    s.y2 = 1;
    s.y = 2;
  } else {
    s.y = params.d;
  }
  return s;
}

ChainStep chain_step(const ChainState& state, int d, Rng& rng, bool emits) {
  if (state.k < 1) throw ArgumentError("chain_step needs k >= 1");
  ChainStep step;
  step.z = binomial(rng, state.y, 1.0 / static_cast<double>(state.k));
  step.j = step.z >= 1 ? 1 : 0;
  step.next.k = state.k - 1;
  step.next.y = state.y - step.z + (emits ? d * step.j : 0);
  return step;
}

ChainStep chain_step_twins(const ChainState& state, int d, Rng& rng, bool emits) {
  if (d != 2) throw UnsupportedVariant("twin chain requires d = 2");
  if (state.k < 1) throw ArgumentError("chain_step_twins needs k >= 1");
  const double k = static_cast<double>(state.k);
  ChainStep step;
  step.z1 = binomial(rng, state.y1, 1.0 / k);
  step.z2 = binomial(rng, state.y2, std::min(1.0, 2.0 / k));
  step.z = step.z1 + step.z2;
  step.j = step.z >= 1 ? 1 : 0;
  step.next.k = state.k - 1;
  step.next.y1 = state.y1 - step.z1 + step.z2;
  step.next.y2 = state.y2 - step.z2 + (emits ? step.j : 0);
  step.next.y = step.next.y1 + 2 * step.next.y2;
  return step;
}

namespace {

std::int64_t count_distinct(std::vector<std::int64_t>& cells) {
  std::sort(cells.begin(), cells.end());
  return std::unique(cells.begin(), cells.end()) - cells.begin();
}

}  // namespace

std::int64_t root_occupancy(std::int64_t y_m, std::int64_t m, Rng& rng) {
  if (y_m <= 0) return 0;
  if (m == 1) return 1;
  std::vector<std::int64_t> cells(static_cast<std::size_t>(y_m));
  for (auto& c : cells) c = uniform_int(rng, 1, m);
  return count_distinct(cells);
}

std::int64_t root_occupancy_twins(std::int64_t singles, std::int64_t pairs,
                                  std::int64_t m, Rng& rng) {
  if (pairs > 0 && m < 2) throw ArgumentError("twin pairs need at least two cells");
  if (singles + pairs <= 0) return 0;
  std::vector<std::int64_t> cells;
  cells.reserve(static_cast<std::size_t>(singles + 2 * pairs));
  for (std::int64_t i = 0; i < singles; ++i) cells.push_back(uniform_int(rng, 1, m));
  for (std::int64_t i = 0; i < pairs; ++i) {
    const std::int64_t a = uniform_int(rng, 1, m);
    std::int64_t b = uniform_int(rng, 1, m - 1);
    if (b >= a) ++b;
    cells.push_back(a);
    cells.push_back(b);
  }
  return count_distinct(cells);
}

ChainSample sample_x(const ChainParams& params, Rng& rng) {
  NullObserver none;
  return run_chain(params, rng, none);
}

namespace {

struct PathFill {
  RawPath* path;
  bool twins;

  void on_segment(std::int64_t lo, std::int64_t hi, const ChainState& s) {
    for (std::int64_t k = lo; k <= hi; ++k) {
      const auto i = static_cast<std::size_t>(k);
      path->y[i] = s.y;
      if (twins) {
        path->y1[i] = s.y1;
        path->y2[i] = s.y2;
      }
    }
  }
  void on_hit(std::int64_t k, std::int64_t z) {
    path->z[static_cast<std::size_t>(k)] = z;
    path->j[static_cast<std::size_t>(k)] = 1;
  }
};

// Steps from `s` down to k = 0, recording as it goes. Vertices above m emit.
void record_steps(RawPath& path, ChainState s, Rng& rng) {
  const auto& p = path.params;
  const bool twins = p.twins();
  while (s.k >= 1) {
    const auto i = static_cast<std::size_t>(s.k);
    path.y[i] = s.y;
    if (twins) {
      path.y1[i] = s.y1;
      path.y2[i] = s.y2;
    }
    const bool emits = s.k > p.m;
    const ChainStep step = twins ? chain_step_twins(s, p.d, rng, emits)
                                 : chain_step(s, p.d, rng, emits);
    path.z[i] = step.z;
    path.j[i] = step.j;
    path.x += step.j;
    s = step.next;
  }
  path.y[0] = s.y;
  if (twins) {
    path.y1[0] = s.y1;
    path.y2[0] = s.y2;
  }
}

}  // namespace

RawPath record_path(const ChainParams& params, Rng& rng, PathMethod method) {
  params.validate();
  RawPath path;
  path.params = params;
  path.params.stop_at = 0;
  const auto n = static_cast<std::size_t>(params.n > 1 ? params.n : 0);
  path.y.assign(n, 0);
  path.z.assign(n, 0);
  path.j.assign(n, 0);
  if (params.twins()) {
    path.y1.assign(n, 0);
    path.y2.assign(n, 0);
  }
  if (params.n <= params.m) return path;

  if (method == PathMethod::stepwise) {
    record_steps(path, initial_state(path.params), rng);
    return path;
  }
  PathFill fill{&path, params.twins()};
  const ChainSample sample = run_chain(path.params, rng, fill, /*resolve_roots=*/false);
  path.x = sample.x;
  // The roots: the surviving edges settle by the same backward steps,
  // without emission, which is the occupancy step unrolled.
  record_steps(path, sample.boundary, rng);
  return path;
}

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// log(1 - c/k) for k = 0..size-1, kept per thread because every path of a
// batch asks for the same values.
const std::vector<double>& log_keep_table(int c, std::size_t size) {
  thread_local std::vector<double> tables[3];
  auto& table = tables[c];
  if (table.size() < size) {
    const std::size_t from = table.size();
    table.resize(size);
    for (std::size_t k = from; k < size; ++k) {
      table[k] = k > static_cast<std::size_t>(c)
                     ? std::log1p(-static_cast<double>(c) / static_cast<double>(k))
                     : -std::numeric_limits<double>::infinity();
    }
  }
  return table;
}

// P(Z_k >= 1 | F_k) for the state recorded at k.
double hit_probability(const RawPath& raw, std::size_t k, const std::vector<double>& keep1,
                       const std::vector<double>& keep2) {
  if (raw.params.twins()) {
    double log_miss = 0.0;
    if (raw.y1[k] > 0) log_miss += static_cast<double>(raw.y1[k]) * keep1[k];
    if (raw.y2[k] > 0) log_miss += static_cast<double>(raw.y2[k]) * keep2[k];
    return std::isinf(log_miss) ? 1.0 : -std::expm1(log_miss);
  }
  if (raw.y[k] == 0) return 0.0;
  if (k == 1) return 1.0;
  return -std::expm1(static_cast<double>(raw.y[k]) * keep1[k]);
}

}  // namespace

ChainPath decompose_path(const RawPath& raw, std::int64_t n1) {
  const auto& p = raw.params;
  ChainPath path;
  path.params = p;
  path.x = raw.x;
  path.y = raw.y;
  path.z = raw.z;
  path.j = raw.j;
  const std::size_t n = raw.y.size();
  path.w.assign(n, 0.0);
  path.martingale.assign(n, 0.0);
  path.compensator.assign(n, 0.0);
  path.drift.assign(n, 0.0);
  path.j_martingale.assign(n, 0.0);
  if (n == 0) return path;

  const int d = p.d;
  for (std::size_t k = 0; k < n; ++k) {
    path.w[k] = rising_factorial(static_cast<double>(k) + 1.0, d - 1) * static_cast<double>(raw.y[k]);
  }

  const auto& keep1 = log_keep_table(1, n);
  const auto& keep2 = log_keep_table(2, p.twins() ? n : 0);
  CompensatedSum a_sum;
  CompensatedSum b_sum;
  std::int64_t red_below_top = 0;  // sum of J_i for i > k
  for (std::size_t k = n - 1; k >= 1; --k) {
    const double kk = static_cast<double>(k);
    const double hit = hit_probability(raw, k, keep1, keep2);
    const double expected_z = static_cast<double>(raw.y[k]) / kk;
    // W_k - E(W_{k-1} | F_k) = d (k)^{(d-1)} (Y_k/k - P(hit)) for an emitting
    // vertex and d (k)^{(d-1)} Y_k/k for a root.
    const bool emits = static_cast<std::int64_t>(k) > p.m;
    const double gap = emits ? std::max(0.0, expected_z - hit) : expected_z;
    a_sum.add(d * rising_factorial(kk, d - 1) * gap);
    b_sum.add(hit);
    red_below_top += raw.j[k];
    path.compensator[k - 1] = a_sum.value();
    path.drift[k - 1] = b_sum.value();
    path.j_martingale[k - 1] = static_cast<double>(red_below_top) - path.drift[k - 1];
  }
  for (std::size_t k = 0; k < n; ++k) path.martingale[k] = path.w[k] + path.compensator[k];

  ChainParams cut = p;
  if (n1 > 0) cut.n1 = n1;
  path.n1 = cut.phase1_cutoff();
  path.xi = path.w[static_cast<std::size_t>(path.n1)] / std::pow(static_cast<double>(p.n), d - 1);
  return path;
}

void write_path_csv(std::ostream& out, const ChainPath& path) {
  out << "k,Y,Z,J,W,M,A,B,L\n";
  const auto precision = out.precision(17);
  for (std::size_t k = 0; k < path.y.size(); ++k) {
    out << k << ',' << path.y[k] << ',' << path.z[k] << ',' << path.j[k] << ',' << path.w[k]
        << ',' << path.martingale[k] << ',' << path.compensator[k] << ',' << path.drift[k]
        << ',' << path.j_martingale[k] << '\n';
  }
  out.precision(precision);
}

}  // namespace udag
