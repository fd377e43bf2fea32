#include "udag/yule.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <random>
#include <unordered_set>

#include "udag/chain.hpp"
#include "udag/errors.hpp"

namespace udag {

std::int64_t YuleTree::count_at(double t) const {
  auto after = std::upper_bound(events.begin(), events.end(), t,
                                [](double value, const Event& e) { return value < e.time; });
  return initial + static_cast<std::int64_t>(after - events.begin()) * (d - 1);
}

namespace {

template <class Stop>
YuleTree run_yule(int d, std::int64_t initial, Rng& rng, double t_max, Stop stop) {
  if (d < 2) throw ArgumentError("Yule offspring count must be at least 2");
  YuleTree tree;
  tree.d = d;
  tree.initial = initial > 0 ? initial : d;
  // alive[i] = event at which particle i was born
  std::vector<std::int64_t> alive(static_cast<std::size_t>(tree.initial), -1);
  double t = 0.0;
  while (!stop(tree)) {
    const double next = t + exponential(rng) / static_cast<double>(alive.size());
    if (next > t_max) break;
    if (next <= t) throw std::runtime_error("Yule event times collided");
    t = next;
    const auto pick = static_cast<std::size_t>(uniform_below(rng, alive.size()));
    const std::int64_t parent = alive[pick];
    const auto event = static_cast<std::int64_t>(tree.events.size());
    tree.events.push_back({t, parent});
    alive[pick] = event;
    for (int i = 1; i < d; ++i) alive.push_back(event);
  }
  tree.horizon = std::isinf(t_max) ? t : t_max;
  return tree;
}

}  // namespace

YuleTree simulate_yule(int d, double t_max, Rng& rng, std::int64_t initial) {
  if (!(t_max >= 0.0)) throw ArgumentError("t_max must be non-negative");
  return run_yule(d, initial, rng, t_max, [](const YuleTree&) { return false; });
}

YuleTree simulate_yule_to_count(int d, std::int64_t target_count, Rng& rng, std::int64_t initial) {
  const std::int64_t start = initial > 0 ? initial : d;
  if (target_count < start) throw ArgumentError("target count below the initial population");
  return run_yule(d, initial, rng, std::numeric_limits<double>::infinity(),
                  [target_count](const YuleTree& t) { return t.final_count() >= target_count; });
}

std::int64_t TimeChangedTree::count_at(double x_query) const {
  // Vertices 1.. are in decreasing x order; count splits with x >= x_query.
  auto first_below = std::partition_point(x.begin() + 1, x.end(),
                                          [x_query](double v) { return v >= x_query; });
  return initial + static_cast<std::int64_t>(first_below - (x.begin() + 1)) * (d - 1);
}

TimeChangedTree time_change(const YuleTree& tree) {
  TimeChangedTree out;
  out.d = tree.d;
  out.initial = tree.initial;
  out.lowest = std::exp(-tree.horizon);
  out.x.reserve(tree.events.size() + 1);
  out.parent.reserve(tree.events.size() + 1);
  out.x.push_back(1.0);
  out.parent.push_back(-1);
  for (const auto& e : tree.events) {
    out.x.push_back(std::exp(-e.time));
    out.parent.push_back(e.parent + 1);
  }
  return out;
}

double yule_limit_sample(int d, double t, Rng& rng) {
  if (d < 2) throw ArgumentError("Yule offspring count must be at least 2");
  if (!(t >= 0.0)) throw ArgumentError("t must be non-negative");
  if (t == 0.0) return d;
  const double p = std::exp(-(d - 1.0) * t);
  const double shape = d / (d - 1.0);
  std::gamma_distribution<double> mean_law(shape, -std::expm1(-(d - 1.0) * t) / p);
  const double lambda = mean_law(rng);
  double failures = 0.0;
  if (lambda > 0.0) {
    std::poisson_distribution<std::int64_t> count_law(lambda);
    failures = static_cast<double>(count_law(rng));
  }
  return p * (d + (d - 1.0) * failures);
}

CouplingReport coupled_prefix(std::int64_t n, int d, Rng& rng, std::int64_t n1) {
  if (n < 2) throw ArgumentError("coupled_prefix needs n >= 2");
  if (d < 2) throw ArgumentError("d must be at least 2");
  CouplingReport report;
  report.n = n;
  report.d = d;
  report.n1 = n1 > 0 ? n1 : default_n1(n);
  report.displacement_bound = std::pow(std::log(static_cast<double>(n)), d) / static_cast<double>(n);
  const double nn = static_cast<double>(n);

  report.vertices.push_back({1.0, n, -1, 0});
  auto by_label = [&report](std::int64_t a, std::int64_t b) {
    return report.vertices[static_cast<std::size_t>(a)].label <
           report.vertices[static_cast<std::size_t>(b)].label;
  };
  std::priority_queue<std::int64_t, std::vector<std::int64_t>, decltype(by_label)> pending(by_label);
  pending.push(0);
  std::unordered_set<std::int64_t> endpoints;

  while (!pending.empty()) {
    const std::int64_t index = pending.top();
    pending.pop();
    const CoupledVertex from = report.vertices[static_cast<std::size_t>(index)];
    if (from.label < 2) continue;
    for (int e = 0; e < d; ++e) {
      const double u = uniform_open(rng);
      CoupledVertex to;
      to.x = from.x * u;
      to.label = static_cast<std::int64_t>(std::floor(static_cast<double>(from.label - 1) * u)) + 1;
      to.parent = index;
      to.depth = from.depth + 1;
      const double scaled = nn * to.x;
      if (static_cast<double>(to.label) > scaled + 1.0 + 1e-9 ||
          static_cast<double>(to.label) < scaled - static_cast<double>(to.depth) - 1e-9) {
        ++report.floor_bound_violations;
      }
      const auto to_index = static_cast<std::int64_t>(report.vertices.size());
      report.vertices.push_back(to);
      if (to.label < report.n1) continue;
      if (!endpoints.insert(to.label).second) {
        report.collision = true;
        report.collision_label = std::max(report.collision_label, to.label);
      }
      pending.push(to_index);
    }
  }
  for (const auto& v : report.vertices) {
    if (v.label >= report.n1) {
      report.max_displacement =
          std::max(report.max_displacement, std::fabs(v.x - static_cast<double>(v.label) / nn));
    }
  }
  return report;
}

void write_yule_csv(std::ostream& out, const YuleTree& tree) {
  out << "event,time,parent\n";
  const auto precision = out.precision(17);
  for (std::size_t i = 0; i < tree.events.size(); ++i) {
    out << i << ',' << tree.events[i].time << ',' << tree.events[i].parent << '\n';
  }
  out.precision(precision);
}

}  // namespace udag
