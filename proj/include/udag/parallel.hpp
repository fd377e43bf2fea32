#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include <omp.h>

#include "udag/rng.hpp"

namespace udag {

// Worker count from the UDAG_WORKERS environment variable, falling back to
// the OpenMP default.
inline int default_workers() {
  if (const char* env = std::getenv("UDAG_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

/// Evaluates kernel(index, rng) for index in [0, count) with the stream
/// seeded by derive_seed(master_seed, index). Results come back in index
/// order, so anything reduced from them afterwards is independent of the
/// number of workers.
template <class T, class Kernel>
std::vector<T> parallel_map(std::int64_t count, int workers, std::uint64_t master_seed,
                            Kernel&& kernel) {
  std::vector<T> out(static_cast<std::size_t>(count));
#pragma omp parallel for num_threads(workers < 1 ? 1 : workers) schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(i)));
    out[static_cast<std::size_t>(i)] = kernel(i, rng);
  }
  return out;
}

// Same contract without threads; the reference for parallel_map.
template <class T, class Kernel>
std::vector<T> serial_map(std::int64_t count, std::uint64_t master_seed, Kernel&& kernel) {
  std::vector<T> out(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(i)));
    out[static_cast<std::size_t>(i)] = kernel(i, rng);
  }
  return out;
}

}  // namespace udag
