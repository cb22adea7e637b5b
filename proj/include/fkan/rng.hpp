#pragma once

// Counter-based random numbers: the value for (seed, stream, counter) is a
// SplitMix64-style finaliser of a mixed key, so any draw can be regenerated
// without replaying a sequence. Coupling from the past relies on this to
// reuse the randomness of time -t across restarts.

#include <cstdint>
#include <limits>

namespace fkan {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ull + 0x632be59bd9b4e019ull))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const { return splitmix64(key_ ^ splitmix64(counter)); }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n) by multiply-shift (bias below 2^-32 for n < 2^32).
  std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits(counter)) * n) >> 64);
  }

 private:
  std::uint64_t key_;
};

/// Sequential adaptor satisfying UniformRandomBitGenerator.
class CounterEngine {
 public:
  using result_type = std::uint64_t;
  CounterEngine(std::uint64_t seed = 0, std::uint64_t stream = 0) : rng_(seed, stream) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return rng_.bits(counter_++); }
  double uniform() { return rng_.uniform(counter_++); }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace fkan
