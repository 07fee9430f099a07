#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rgnn {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based seed derivation: the same (seed, keys...) always maps to the same stream.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stream tags for derive_seed so independent consumers never share draws.
namespace streams {
inline constexpr std::uint64_t kShuffle = 1;
inline constexpr std::uint64_t kTarget = 2;
inline constexpr std::uint64_t kDropout = 3;
inline constexpr std::uint64_t kInit = 4;
inline constexpr std::uint64_t kSynth = 5;
}  // namespace streams

}  // namespace rgnn
