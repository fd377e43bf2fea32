#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "udag/errors.hpp"
#include "udag/rng.hpp"

namespace udag {

// Vertex labels are 1-based throughout: vertex 1 is the oldest root and
// vertex n the newest. Arrays indexed by label document their origin.
using Vertex = std::int64_t;

enum class Replacement { with, without };

std::string_view to_string(Replacement r);
Replacement parse_replacement(std::string_view text);

/// Parameters of the uniform-attachment d-dag.
///
/// Vertices 1..m are roots with no outgoing edges. Every later vertex k
/// sends d edges to endpoints drawn uniformly from [1, k-1], either
/// independently (with replacement, multi-edges allowed) or as a uniform
/// d-subset (without replacement, which needs m >= d).
struct DagConfig {
  int d = 2;
  std::int64_t n = 1;
  std::int64_t m = 1;
  Replacement replacement = Replacement::with;

  // Throws ConfigError.
  void validate() const;

  bool operator==(const DagConfig&) const = default;
};

/// A realized d-dag. Endpoints are stored flat and ordered: vertex k (m < k
/// <= n) owns endpoints[(k-m-1)*d .. (k-m)*d).
struct Dag {
  DagConfig config;
  std::vector<Vertex> endpoints;

  bool is_root(Vertex v) const { return v <= config.m; }
  std::span<const Vertex> endpoints_of(Vertex k) const;

  bool operator==(const Dag&) const = default;
};

/// Closure of `source` under "follow every outgoing edge".
struct DescendantSet {
  Vertex source = 0;
  std::vector<Vertex> members;  // ascending
  // Edge slots leaving member vertices; multi-edges count once per slot.
  std::int64_t red_edge_count = 0;

  std::int64_t size() const { return static_cast<std::int64_t>(members.size()); }
  bool contains(Vertex v) const;
};

Dag build_dag(const DagConfig& config, Rng& rng);

// Throws ArgumentError when v is outside [1, n].
DescendantSet descendants(const Dag& dag, Vertex v);

/// Y_k for k = 0..n-1 (index origin 0): the number of edges leaving a
/// descendant of v with start > k and endpoint <= k. For v = n this is the
/// trajectory the backward chain samples.
std::vector<std::int64_t> gap_crossings(const Dag& dag, Vertex v);

/// Number of common descendants of vertices a and b.
std::int64_t common_descendants(const Dag& dag, Vertex a, Vertex b);

/// Exact law of |descendants(n)| by visiting every equally likely endpoint
/// configuration. Probabilities are count/total.
struct ExactPmf {
  std::map<std::int64_t, std::uint64_t> counts;
  std::uint64_t total = 0;

  double probability(std::int64_t x) const;
  double mean() const;
  std::map<std::int64_t, double> as_doubles() const;
};

inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

// Number of equally likely configurations of the whole dag; saturates at
// UINT64_MAX.
std::uint64_t configuration_count(const DagConfig& config);

// Throws SizeError when configuration_count exceeds kEnumerationGuard.
ExactPmf enumerate_exact(const DagConfig& config);

/// Line-oriented text form:
///   d n m with|without
///   k: e1 e2 ... ed        (one line per non-root vertex, k ascending)
void write_dag(std::ostream& out, const Dag& dag);
Dag read_dag(std::istream& in);  // throws ParseError / ConfigError

}  // namespace udag
