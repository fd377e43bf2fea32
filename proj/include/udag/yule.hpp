#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "udag/rng.hpp"

namespace udag {

/// Genealogy of a d-ary Yule process (Exp(1) lifetimes, every split
/// produces d particles). Event i is the i-th split; `parent` is the event
/// at which the splitting particle was born, -1 for an initial particle.
struct YuleTree {
  struct Event {
    double time;
    std::int64_t parent;
  };

  int d = 2;
  std::int64_t initial = 2;
  double horizon = 0.0;  // simulated up to this time
  std::vector<Event> events;

  // Particles alive at time t <= horizon.
  std::int64_t count_at(double t) const;
  std::int64_t final_count() const {
    return initial + static_cast<std::int64_t>(events.size()) * (d - 1);
  }
};

// Event-driven simulation up to t_max: one exponential clock of rate equal
// to the population. `initial` defaults to d.
YuleTree simulate_yule(int d, double t_max, Rng& rng, std::int64_t initial = 0);
// Runs until the population first reaches at least target_count. Throws
// ArgumentError when target_count < initial.
YuleTree simulate_yule_to_count(int d, std::int64_t target_count, Rng& rng,
                                std::int64_t initial = 0);

/// The tree after t -> e^{-t}: vertex 0 is the root at 1, vertex i > 0 is
/// split event i-1 at e^{-time}. An edge runs from parent[i] to i.
struct TimeChangedTree {
  int d = 2;
  std::int64_t initial = 2;
  double lowest = 1.0;  // e^{-horizon}
  std::vector<double> x;
  std::vector<std::int64_t> parent;  // parent[0] = -1

  // Particles (edges) alive at x in [lowest, 1].
  std::int64_t count_at(double x_query) const;
};

TimeChangedTree time_change(const YuleTree& tree);

// e^{-(d-1)t} Y_t drawn from the exact marginal of Y_t:
// (Y_t - d)/(d-1) ~ NegBin(d/(d-1), e^{-(d-1)t}), sampled as a Poisson with
// Gamma-distributed mean.
double yule_limit_sample(int d, double t, Rng& rng);

struct CoupledVertex {
  double x = 1.0;           // Yule label, a product of uniforms
  std::int64_t label = 0;   // dag label by nested floors
  std::int64_t parent = -1; // index into the vertex list
  std::int64_t depth = 0;
};

struct CouplingReport {
  std::int64_t n = 0;
  int d = 2;
  std::int64_t n1 = 0;
  std::vector<CoupledVertex> vertices;  // all generated vertices
  double max_displacement = 0.0;        // over vertices with label >= n1
  double displacement_bound = 0.0;      // log^d n / n
  bool collision = false;               // two edges ending at one k >= n1
  std::int64_t collision_label = 0;     // largest such k
  std::int64_t floor_bound_violations = 0;  // labels breaking n x + 1 >= X >= n x - depth
};

/// Builds the time-changed Yule tree and the red dag above n1 from the same
/// uniforms: an edge from Yule label x to x U, and from dag label j+1 to
/// floor(j U) + 1. Vertices are expanded while their dag label is >= n1.
CouplingReport coupled_prefix(std::int64_t n, int d, Rng& rng, std::int64_t n1 = 0);

// CSV with header event,time,parent.
void write_yule_csv(std::ostream& out, const YuleTree& tree);

}  // namespace udag
