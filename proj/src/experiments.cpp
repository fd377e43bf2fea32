#include "udag/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "udag/errors.hpp"
#include "udag/limits.hpp"
#include "udag/parallel.hpp"

namespace udag {

std::vector<ChainSample> chain_samples(const ChainParams& params, std::int64_t count,
                                       const RunOptions& run) {
  params.validate();
  return parallel_map<ChainSample>(count, run.workers, run.seed,
                                   [&params](std::int64_t, Rng& rng) { return sample_x(params, rng); });
}

std::vector<std::int64_t> forward_samples(const DagConfig& config, std::int64_t count,
                                          const RunOptions& run) {
  config.validate();
  return parallel_map<std::int64_t>(count, run.workers, run.seed, [&config](std::int64_t, Rng& rng) {
    const Dag dag = build_dag(config, rng);
    return descendants(dag, config.n).size();
  });
}

namespace {

class ProbeObserver {
 public:
  ProbeObserver(const ChainParams& params, const ProbeRequest& request, PathProbe& out)
      : params_(params), request_(request), out_(out) {
    out_.y.assign(request.y_at.size(), 0);
    out_.j.assign(request.j_at.size(), 0);
    n1_ = params.phase1_cutoff();
    n2_ = request.n2 > 0 ? request.n2 : default_n2(params.n, params.d);
  }

  void on_segment(std::int64_t lo, std::int64_t hi, const ChainState& s) {
    const auto& ks = request_.y_at;
    for (auto it = std::lower_bound(ks.begin(), ks.end(), lo); it != ks.end() && *it <= hi; ++it) {
      out_.y[static_cast<std::size_t>(it - ks.begin())] = s.y;
    }
    if (request_.flatness) {
      const std::int64_t a = std::max(lo, n2_);
      const std::int64_t b = std::min(hi, n1_);
      if (a <= b) {
        // W is increasing in k while Y stays constant.
        const double y = static_cast<double>(s.y);
        w_min_ = std::min(w_min_, rising_factorial(static_cast<double>(a) + 1.0, params_.d - 1) * y);
        w_max_ = std::max(w_max_, rising_factorial(static_cast<double>(b) + 1.0, params_.d - 1) * y);
      }
    }
  }

  void on_hit(std::int64_t k, std::int64_t) {
    const auto& ks = request_.j_at;
    auto it = std::lower_bound(ks.begin(), ks.end(), k);
    if (it != ks.end() && *it == k) out_.j[static_cast<std::size_t>(it - ks.begin())] = 1;
  }

  void finish(const ChainSample& sample) {
    out_.x = sample.x;
    out_.xi = sample.xi;
    if (request_.flatness && w_max_ >= 0.0) {
      const double scale = std::pow(static_cast<double>(params_.n), params_.d - 1);
      out_.flat_deviation =
          std::max(std::fabs(w_max_ / scale - sample.xi), std::fabs(w_min_ / scale - sample.xi));
    }
  }

 private:
  const ChainParams& params_;
  const ProbeRequest& request_;
  PathProbe& out_;
  std::int64_t n1_ = 0;
  std::int64_t n2_ = 0;
  double w_min_ = std::numeric_limits<double>::infinity();
  double w_max_ = -1.0;
};

}  // namespace

std::vector<PathProbe> probe_paths(const ChainParams& params, const ProbeRequest& request,
                                   std::int64_t count, const RunOptions& run) {
  params.validate();
  if (!std::is_sorted(request.y_at.begin(), request.y_at.end()) ||
      !std::is_sorted(request.j_at.begin(), request.j_at.end())) {
    throw ArgumentError("probe indices must be ascending");
  }
  return parallel_map<PathProbe>(count, run.workers, run.seed, [&](std::int64_t, Rng& rng) {
    PathProbe probe;
    ProbeObserver observer(params, request, probe);
    observer.finish(run_chain(params, rng, observer));
    return probe;
  });
}

std::vector<double> t_grid(double t_lo, double t_hi, double step) {
  std::vector<double> ts;
  const auto steps = static_cast<int>(std::floor((t_hi - t_lo) / step + 1e-9));
  for (int i = 0; i <= steps; ++i) ts.push_back(t_lo + i * step);
  return ts;
}

std::int64_t phase3_index(std::int64_t n, int d, double t) {
  const double scale = std::pow(static_cast<double>(n), (d - 1.0) / d);
  const auto k = static_cast<std::int64_t>(std::ceil(t * scale - 1e-9));
  return std::clamp<std::int64_t>(k, 1, n - 1);
}

Phase3Result phase3_deviation(const ChainParams& params, const std::vector<double>& ts,
                              const ProbeRequest& request, const std::vector<PathProbe>& paths) {
  Phase3Result result;
  const double scale = std::pow(static_cast<double>(params.n), params.d - 1);
  std::vector<std::size_t> slot;
  for (double t : ts) {
    const std::int64_t k = phase3_index(params.n, params.d, t);
    auto it = std::lower_bound(request.y_at.begin(), request.y_at.end(), k);
    if (it == request.y_at.end() || *it != k) throw ArgumentError("probe is missing a phase-III index");
    slot.push_back(static_cast<std::size_t>(it - request.y_at.begin()));
  }
  for (const auto& path : paths) {
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const std::int64_t k = request.y_at[slot[i]];
      const double w = rising_factorial(static_cast<double>(k) + 1.0, params.d - 1) *
                       static_cast<double>(path.y[slot[i]]) / scale;
      worst = std::max(worst, std::fabs(w - phase3_profile(params.d, ts[i], path.xi)));
    }
    result.sup_deviation.push_back(worst);
  }
  if (!paths.empty()) {
    std::vector<double> sorted = result.sup_deviation;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    result.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    RunningMoments acc;
    for (double v : sorted) acc.add(v);
    result.mean = acc.mean();
  }
  return result;
}

std::vector<std::int64_t> density_grid(std::int64_t n, const std::vector<double>& ts) {
  const std::int64_t n1 = default_n1(n);
  const double root = std::sqrt(static_cast<double>(n));
  std::vector<std::int64_t> ks;
  for (double t : ts) {
    const auto k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(t * root - 1e-9)));
    if (k <= n1 && k <= n - 1) ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

DensityResult density_table(std::int64_t n, const ProbeRequest& request,
                            const std::vector<PathProbe>& paths) {
  DensityResult result;
  const double root = std::sqrt(static_cast<double>(n));
  const double count = static_cast<double>(paths.size());
  for (std::size_t i = 0; i < request.j_at.size(); ++i) {
    DensityRow row;
    row.k = request.j_at[i];
    row.t = static_cast<double>(row.k) / root;
    double hits = 0.0;
    for (const auto& p : paths) hits += p.j[i];
    row.frequency = hits / count;
    row.se = std::sqrt(row.frequency * (1.0 - row.frequency) / count);
    row.reference = descendant_density(row.t);
    result.sup_deviation = std::max(result.sup_deviation, std::fabs(row.frequency - row.reference));
    result.rows.push_back(row);
  }
  return result;
}

ConditionalResult conditional_experiment(std::int64_t n, std::int64_t m, std::int64_t count,
                                         const RunOptions& run) {
  ChainParams params;
  params.d = 2;
  params.n = n;
  params.m = m;
  const auto samples = chain_samples(params, count, run);
  const double root = std::sqrt(static_cast<double>(n));
  const double mu = static_cast<double>(m) / root;
  RunningMoments deviation;
  RunningMoments scaled;
  for (const auto& s : samples) {
    const double reference =
        m == 1 ? 0.5 * std::numbers::pi * std::sqrt(s.xi) : psi_mu(mu, s.xi);
    const double x = static_cast<double>(s.x) / root;
    deviation.add(std::fabs(x - reference));
    scaled.add(x);
  }
  return {deviation.mean(), scaled.mean(), scaled.standard_error(), count};
}

IndependenceResult independence_experiment(std::int64_t n, std::int64_t count,
                                           const RunOptions& run) {
  struct Joint {
    double x0 = 0.0, x1 = 0.0, common = 0.0;
  };
  const DagConfig config{2, n + 1, 1, Replacement::with};
  config.validate();
  const auto joint = parallel_map<Joint>(count, run.workers, run.seed, [&](std::int64_t, Rng& rng) {
    const Dag dag = build_dag(config, rng);
    return Joint{static_cast<double>(descendants(dag, n).size()),
                 static_cast<double>(descendants(dag, n + 1).size()),
                 static_cast<double>(common_descendants(dag, n, n + 1))};
  });
  std::vector<double> x0;
  std::vector<double> x1;
  RunningMoments upsilon;
  const double root = std::sqrt(static_cast<double>(n));
  for (const auto& j : joint) {
    x0.push_back(j.x0);
    x1.push_back(j.x1);
    upsilon.add(j.common / root);
  }
  IndependenceResult result;
  result.n = n;
  result.count = count;
  result.correlation = pearson(x0, x1);
  result.grid_dependence = quantile_grid_dependence(x0, x1);
  result.upsilon_mean = upsilon.mean();
  result.upsilon_se = upsilon.standard_error();
  return result;
}

std::int64_t count_path_violations(const ChainPath& path, double rel_tol) {
  const auto& p = path.params;
  const std::size_t n = path.y.size();
  if (n == 0) return 0;
  std::int64_t bad = 0;
  auto close = [rel_tol](double a, double b) {
    return std::fabs(a - b) <= rel_tol * std::max({1.0, std::fabs(a), std::fabs(b)});
  };
  if (path.y[n - 1] != p.d) ++bad;
  if (path.y[0] != 0) ++bad;
  if (path.compensator[n - 1] != 0.0 || path.drift[n - 1] != 0.0) ++bad;
  std::int64_t red = 0;
  for (std::size_t k = 1; k < n; ++k) {
    red += path.j[k];
    if (path.j[k] != (path.z[k] >= 1 ? 1 : 0)) ++bad;
    const std::int64_t emitted = static_cast<std::int64_t>(k) > p.m ? p.d * path.j[k] : 0;
    if (path.y[k - 1] != path.y[k] - path.z[k] + emitted) ++bad;
    const double a_tol = rel_tol * std::max(1.0, path.compensator[k]);
    if (path.compensator[k - 1] < path.compensator[k] - a_tol) ++bad;
    if (path.drift[k - 1] < path.drift[k] - rel_tol * std::max(1.0, path.drift[k])) ++bad;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (path.w[k] > path.martingale[k] + rel_tol * std::max(1.0, path.martingale[k])) ++bad;
  }
  if (p.m == 1 && path.x != 1 + red) ++bad;
  if (!close(static_cast<double>(1 + red), 1.0 + path.j_martingale[0] + path.drift[0])) ++bad;
  const double top = p.d * rising_factorial(static_cast<double>(p.n), p.d - 1);
  if (!close(path.martingale[n - 1], top)) ++bad;
  return bad;
}

MartingaleResult martingale_experiment(const ChainParams& params, std::int64_t count,
                                       const RunOptions& run, int grid_points) {
  params.validate();
  MartingaleResult result;
  result.paths = count;
  result.target = params.d * rising_factorial(static_cast<double>(params.n), params.d - 1);
  // Geometric grid from 1 to n/2. Close to n - 1 almost every path has
  // the same M_k, so the sample standard error says nothing there.
  const double top = std::max(1.0, std::floor(0.5 * static_cast<double>(params.n)));
  for (int i = 0; i < grid_points; ++i) {
    const double frac = grid_points > 1 ? static_cast<double>(i) / (grid_points - 1) : 0.0;
    const auto k = static_cast<std::int64_t>(std::llround(std::exp(frac * std::log(top))));
    result.grid.push_back(std::clamp<std::int64_t>(k, 1, params.n - 1));
  }
  struct Outcome {
    std::int64_t violations = 0;
    std::vector<double> m;
  };
  const auto outcomes = parallel_map<Outcome>(count, run.workers, run.seed, [&](std::int64_t, Rng& rng) {
    const ChainPath path = decompose_path(record_path(params, rng));
    Outcome o;
    o.violations = count_path_violations(path);
    for (auto k : result.grid) o.m.push_back(path.martingale[static_cast<std::size_t>(k)]);
    return o;
  });
  std::vector<RunningMoments> acc(result.grid.size());
  for (const auto& o : outcomes) {
    result.violations += o.violations;
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i].add(o.m[i]);
  }
  for (const auto& a : acc) {
    result.m_mean.push_back(a.mean());
    result.m_se.push_back(a.standard_error());
    const double gap = std::fabs(a.mean() - result.target);
    const double z = a.standard_error() > 0.0 ? gap / a.standard_error() : (gap > 0.0 ? INFINITY : 0.0);
    result.worst_z = std::max(result.worst_z, z);
  }
  return result;
}

}  // namespace udag
