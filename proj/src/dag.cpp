#include "udag/dag.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace udag {

std::string_view to_string(Replacement r) {
  return r == Replacement::with ? "with" : "without";
}

Replacement parse_replacement(std::string_view text) {
  if (text == "with") return Replacement::with;
  if (text == "without") return Replacement::without;
  throw ConfigError("replacement must be 'with' or 'without', got '" +
                    std::string(text) + "'");
}

void DagConfig::validate() const {
  if (d < 2) throw ConfigError("d must be at least 2");
  if (n < 1) throw ConfigError("n must be at least 1");
  if (m < 1 || m > n) throw ConfigError("m must lie in [1, n]");
  if (replacement == Replacement::without && m < d) {
    throw ConfigError("drawing without replacement needs at least d roots");
  }
}

std::span<const Vertex> Dag::endpoints_of(Vertex k) const {
  if (k <= config.m || k > config.n) return {};
  const auto offset = static_cast<std::size_t>((k - config.m - 1) * config.d);
  return {endpoints.data() + offset, static_cast<std::size_t>(config.d)};
}

bool DescendantSet::contains(Vertex v) const {
  return std::binary_search(members.begin(), members.end(), v);
}

namespace {

// Uniform ordered d-tuple of distinct labels from [1, k-1].
void draw_distinct(Rng& rng, Vertex k, int d, Vertex* out,
                   std::vector<Vertex>& scratch) {
  const Vertex pool = k - 1;
  if (2 * static_cast<Vertex>(d) >= pool) {
    // Partial Fisher-Yates over the whole (small) pool.
    scratch.resize(static_cast<std::size_t>(pool));
    std::iota(scratch.begin(), scratch.end(), Vertex{1});
    for (int i = 0; i < d; ++i) {
      const auto j = static_cast<std::size_t>(uniform_int(rng, i, pool - 1));
      std::swap(scratch[static_cast<std::size_t>(i)], scratch[j]);
      out[i] = scratch[static_cast<std::size_t>(i)];
    }
    return;
  }
  for (int i = 0; i < d; ++i) {
    Vertex candidate;
    do {
      candidate = uniform_int(rng, 1, pool);
    } while (std::find(out, out + i, candidate) != out + i);
    out[i] = candidate;
  }
}

// Reusable traversal state so enumeration does not allocate per visit.
class Traversal {
 public:
  explicit Traversal(Vertex n) : mark_(static_cast<std::size_t>(n) + 1, 0) {}

  // Calls visit(v) once for every descendant of source.
  template <class Visit>
  void run(const Dag& dag, Vertex source, Visit&& visit) {
    if (++epoch_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      epoch_ = 1;
    }
    stack_.clear();
    stack_.push_back(source);
    mark_[static_cast<std::size_t>(source)] = epoch_;
    while (!stack_.empty()) {
      const Vertex v = stack_.back();
      stack_.pop_back();
      visit(v);
      for (const Vertex e : dag.endpoints_of(v)) {
        auto& mark = mark_[static_cast<std::size_t>(e)];
        if (mark != epoch_) {
          mark = epoch_;
          stack_.push_back(e);
        }
      }
    }
  }

  std::int64_t count(const Dag& dag, Vertex source) {
    std::int64_t size = 0;
    run(dag, source, [&](Vertex) { ++size; });
    return size;
  }

 private:
  std::vector<std::uint32_t> mark_;
  std::uint32_t epoch_ = 0;
  std::vector<Vertex> stack_;
};

void check_vertex(const Dag& dag, Vertex v) {
  if (v < 1 || v > dag.config.n) {
    throw ArgumentError("vertex " + std::to_string(v) + " outside [1, " +
                        std::to_string(dag.config.n) + "]");
  }
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t next = saturating_mul(result, n - k + i);
    if (next == std::numeric_limits<std::uint64_t>::max()) return next;
    result = next / i;
  }
  return result;
}

// Advances the endpoint slots of one vertex to the next configuration in
// lexicographic order. Returns false (after resetting to the first
// configuration) on wrap-around.
bool next_choice(std::span<Vertex> slots, Vertex k, Replacement replacement) {
  const Vertex pool = k - 1;
  const auto d = slots.size();
  if (replacement == Replacement::with) {
    for (std::size_t i = d; i-- > 0;) {
      if (slots[i] < pool) {
        ++slots[i];
        return true;
      }
      slots[i] = 1;
    }
    return false;
  }
  // Ascending combinations c_0 < ... < c_{d-1} <= pool.
  for (std::size_t i = d; i-- > 0;) {
    if (slots[i] < pool - static_cast<Vertex>(d - 1 - i)) {
      ++slots[i];
      for (std::size_t j = i + 1; j < d; ++j) slots[j] = slots[j - 1] + 1;
      return true;
    }
  }
  for (std::size_t i = 0; i < d; ++i) slots[i] = static_cast<Vertex>(i) + 1;
  return false;
}

}  // namespace

Dag build_dag(const DagConfig& config, Rng& rng) {
  config.validate();
  Dag dag{config, {}};
  const auto d = config.d;
  dag.endpoints.resize(static_cast<std::size_t>((config.n - config.m) * d));
  std::vector<Vertex> scratch;
  Vertex* out = dag.endpoints.data();
  for (Vertex k = config.m + 1; k <= config.n; ++k, out += d) {
    if (config.replacement == Replacement::with) {
      for (int i = 0; i < d; ++i) out[i] = uniform_int(rng, 1, k - 1);
    } else {
      draw_distinct(rng, k, d, out, scratch);
    }
  }
  return dag;
}

DescendantSet descendants(const Dag& dag, Vertex v) {
  check_vertex(dag, v);
  DescendantSet set;
  set.source = v;
  Traversal traversal(dag.config.n);
  traversal.run(dag, v, [&](Vertex u) {
    set.members.push_back(u);
    if (!dag.is_root(u)) set.red_edge_count += dag.config.d;
  });
  std::sort(set.members.begin(), set.members.end());
  return set;
}

std::vector<std::int64_t> gap_crossings(const Dag& dag, Vertex v) {
  check_vertex(dag, v);
  const auto n = static_cast<std::size_t>(dag.config.n);
  // diff over labels 0..n; an edge u -> e crosses gaps e..u-1.
  std::vector<std::int64_t> diff(n + 1, 0);
  Traversal traversal(dag.config.n);
  traversal.run(dag, v, [&](Vertex u) {
    for (const Vertex e : dag.endpoints_of(u)) {
      ++diff[static_cast<std::size_t>(e)];
      --diff[static_cast<std::size_t>(u)];
    }
  });
  std::vector<std::int64_t> y(n, 0);
  std::int64_t running = 0;
  for (std::size_t k = 0; k < n; ++k) {
    running += diff[k];
    y[k] = running;
  }
  return y;
}

std::int64_t common_descendants(const Dag& dag, Vertex a, Vertex b) {
  check_vertex(dag, a);
  check_vertex(dag, b);
  std::vector<char> in_a(static_cast<std::size_t>(dag.config.n) + 1, 0);
  Traversal traversal(dag.config.n);
  traversal.run(dag, a, [&](Vertex u) { in_a[static_cast<std::size_t>(u)] = 1; });
  std::int64_t common = 0;
  traversal.run(dag, b, [&](Vertex u) { common += in_a[static_cast<std::size_t>(u)]; });
  return common;
}

double ExactPmf::probability(std::int64_t x) const {
  const auto it = counts.find(x);
  if (it == counts.end() || total == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total);
}

double ExactPmf::mean() const {
  double sum = 0.0;
  for (const auto& [x, count] : counts) sum += static_cast<double>(x) * static_cast<double>(count);
  return total == 0 ? 0.0 : sum / static_cast<double>(total);
}

std::map<std::int64_t, double> ExactPmf::as_doubles() const {
  std::map<std::int64_t, double> out;
  for (const auto& [x, count] : counts) out[x] = probability(x);
  return out;
}

std::uint64_t configuration_count(const DagConfig& config) {
  config.validate();
  std::uint64_t total = 1;
  for (Vertex k = config.m + 1; k <= config.n; ++k) {
    const auto pool = static_cast<std::uint64_t>(k - 1);
    std::uint64_t choices = 1;
    if (config.replacement == Replacement::with) {
      for (int i = 0; i < config.d; ++i) choices = saturating_mul(choices, pool);
    } else {
      choices = choose(pool, static_cast<std::uint64_t>(config.d));
    }
    total = saturating_mul(total, choices);
  }
  return total;
}

ExactPmf enumerate_exact(const DagConfig& config) {
  const std::uint64_t total = configuration_count(config);
  if (total > kEnumerationGuard) {
    throw SizeError("enumeration needs " + std::to_string(total) +
                    " configurations, above the guard of " +
                    std::to_string(kEnumerationGuard));
  }
  Dag dag{config, {}};
  const auto d = static_cast<std::size_t>(config.d);
  dag.endpoints.resize(static_cast<std::size_t>(config.n - config.m) * d);
  for (Vertex k = config.m + 1; k <= config.n; ++k) {
    auto slots = std::span<Vertex>(dag.endpoints).subspan(
        static_cast<std::size_t>(k - config.m - 1) * d, d);
    for (std::size_t i = 0; i < d; ++i) {
      slots[i] = config.replacement == Replacement::with ? 1 : static_cast<Vertex>(i) + 1;
    }
  }

  ExactPmf pmf;
  Traversal traversal(config.n);
  for (;;) {
    ++pmf.counts[traversal.count(dag, config.n)];
    ++pmf.total;
    // Odometer over vertices, lowest label fastest.
    bool advanced = false;
    for (Vertex k = config.m + 1; k <= config.n && !advanced; ++k) {
      auto slots = std::span<Vertex>(dag.endpoints).subspan(
          static_cast<std::size_t>(k - config.m - 1) * d, d);
      advanced = next_choice(slots, k, config.replacement);
    }
    if (!advanced) break;
  }
  return pmf;
}

void write_dag(std::ostream& out, const Dag& dag) {
  const auto& c = dag.config;
  out << c.d << ' ' << c.n << ' ' << c.m << ' ' << to_string(c.replacement) << '\n';
  for (Vertex k = c.m + 1; k <= c.n; ++k) {
    out << k << ':';
    for (const Vertex e : dag.endpoints_of(k)) out << ' ' << e;
    out << '\n';
  }
}

Dag read_dag(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header line");
  DagConfig config;
  {
    std::istringstream header(line);
    std::string replacement;
    if (!(header >> config.d >> config.n >> config.m >> replacement)) {
      throw ParseError("header must be 'd n m with|without'");
    }
    config.replacement = parse_replacement(replacement);
  }
  config.validate();

  Dag dag{config, {}};
  dag.endpoints.reserve(static_cast<std::size_t>((config.n - config.m) * config.d));
  for (Vertex k = config.m + 1; k <= config.n; ++k) {
    if (!std::getline(in, line)) {
      throw ParseError("expected a line for vertex " + std::to_string(k));
    }
    std::istringstream row(line);
    Vertex label = 0;
    char colon = 0;
    if (!(row >> label >> colon) || colon != ':' || label != k) {
      throw ParseError("expected '" + std::to_string(k) + ":' at start of line");
    }
    const auto first = dag.endpoints.size();
    for (int i = 0; i < config.d; ++i) {
      Vertex e = 0;
      if (!(row >> e)) throw ParseError("vertex " + std::to_string(k) + " needs d endpoints");
      if (e < 1 || e >= k) {
        throw ParseError("endpoint " + std::to_string(e) + " of vertex " +
                         std::to_string(k) + " out of range");
      }
      dag.endpoints.push_back(e);
    }
    std::string extra;
    if (row >> extra) throw ParseError("trailing data on line for vertex " + std::to_string(k));
    if (config.replacement == Replacement::without) {
      std::vector<Vertex> sorted(dag.endpoints.begin() + static_cast<std::ptrdiff_t>(first),
                                 dag.endpoints.end());
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ParseError("repeated endpoint at vertex " + std::to_string(k));
      }
    }
  }
  return dag;
}

}  // namespace udag
