#pragma once

#include <cstdint>
#include <random>

namespace domino {

/// Generator used by every stochastic operation. mt19937_64 is fully
/// specified by the standard, so streams are reproducible across platforms.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based sub-seed: depends only on (parent, index), never on the
/// order in which sub-seeds are requested.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(mix64(parent) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Fixed stream tags used when one seed feeds several independent draws.
namespace stream {
inline constexpr std::uint64_t kPoints = 1;
inline constexpr std::uint64_t kAngles = 2;
inline constexpr std::uint64_t kOrigin = 3;
}  // namespace stream

/// Uniform double in [0, 1) from the top 53 bits; unlike
/// std::uniform_real_distribution the mapping is not implementation-defined.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace domino
