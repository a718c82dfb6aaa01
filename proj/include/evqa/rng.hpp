// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVQA_RNG_HPP
#define EVQA_RNG_HPP

#include <cstdint>
#include <string_view>

// Pinned pseudo-randomness for the seeded baselines. Standard-library
// distributions are implementation-defined, so draws here are fully
// specified: SplitMix64 streams and rejection-sampled bounded picks.
// Per-question streams hash the question id so results do not depend on
// execution order.
namespace evqa::rng {

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline SplitMix64 question_stream(std::uint64_t seed, std::string_view question_id) {
  return SplitMix64{seed ^ fnv1a64(question_id)};
}

// Uniform pick in [0, n) without modulo bias.
inline std::size_t bounded(SplitMix64& g, std::size_t n) {
  const std::uint64_t span = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t v = g.next();
  while (v >= limit) v = g.next();
  return static_cast<std::size_t>(v % span);
}

}  // namespace evqa::rng

#endif  // EVQA_RNG_HPP
