#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace udag {

// SplitMix64 output function. Used to expand seeds and to derive per-sample
// streams; never used as the simulation generator itself.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += 0x9e3779b97f4a7c15ULL;
  return mix64(state);
}

// Seed for replica `index` of a run with master seed `master`. A pure
// function of its arguments, so results never depend on how indices are
// scheduled across workers.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(master ^ 0x6a09e667f3bcc909ULL) +
               0x9e3779b97f4a7c15ULL * (index + 1));
}

/// xoshiro256** 1.0. Satisfies UniformRandomBitGenerator so it can drive
/// the <random> distributions as well as the samplers below.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0x853c49e6748fea9bULL) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

 private:
  std::uint64_t s_[4];
};

using Rng = Xoshiro256;

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1); safe to pass to log().
inline double uniform_open(Rng& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) noexcept {
  __uint128_t m = static_cast<__uint128_t>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<__uint128_t>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Uniform integer in the closed range [lo, hi].
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo,
                                std::int64_t hi) noexcept {
  return lo + static_cast<std::int64_t>(
                  uniform_below(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

inline double exponential(Rng& rng) noexcept { return -std::log(uniform_open(rng)); }

}  // namespace udag
