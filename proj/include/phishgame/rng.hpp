// Seeded random number generation with a portable output sequence.
//
// std::uniform_int_distribution and friends are implementation-defined, so
// replayable transcripts cannot depend on them. Rng draws raw 64-bit words
// from std::mt19937_64 (fully specified by the standard) and maps them to
// ranges itself.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace phishgame {

/// SplitMix64 finalizer. Used both as a seed mixer and to derive child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Child seed for episode `index` of a batch rooted at `base`:
///   child = mix64(base ^ mix64(index))
constexpr std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index));
}

/// FNV-1a over a stream label, so named substreams of one seed are
/// independent of each other and of the order they are created in.
constexpr std::uint64_t stream_tag(std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return mix64(seed ^ stream_tag(label));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound) {
    // Rejection sampling on the largest multiple of bound.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace phishgame
