#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

// Seed derivation and uniform draws used by every randomized component.
// The std::mt19937_64 engine is fully specified by the standard; the
// distribution mappings below are pinned here because the standard leaves
// std::uniform_* unspecified, and expected-disorder values must be
// bit-identical across platforms and parallel schedules.

namespace propspan::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Per-(paragraph, sample) seed stream: independent of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view key,
                                 std::uint64_t index) {
  std::uint64_t state = base ^ fnv1a64(key);
  std::uint64_t a = splitmix64(state);
  state ^= index;
  std::uint64_t b = splitmix64(state);
  return a ^ (b + 0x9E3779B97F4A7C15ULL);
}

/// Unbiased integer in [0, n) via rejection sampling. n must be > 0.
inline std::uint64_t uniform_below(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

/// Uniform double in [0, 1) with 53 bits of randomness.
inline double uniform_real(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace propspan::rng
