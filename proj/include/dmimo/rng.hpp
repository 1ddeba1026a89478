#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dmimo {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent child seed from a root seed and a path of stream
/// labels. Each label is folded in with one splitmix64 step, so
/// derive_seed(s, {a, b}) differs from derive_seed(s, {b, a}).
inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = splitmix64(root);
  for (std::uint64_t label : path) state = splitmix64(state ^ splitmix64(label + 1));
  return state;
}

// Stream labels used by the scenario engine.
inline constexpr std::uint64_t kStreamPlacement = 0x706c6163;  // "plac"
inline constexpr std::uint64_t kStreamChannelError = 0x6572726f;  // "erro"
inline constexpr std::uint64_t kStreamOffsets = 0x6f666673;  // "offs"

}  // namespace dmimo
