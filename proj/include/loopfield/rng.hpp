#pragma once

#include <cstdint>
#include <random>

namespace loopfield {

using RandomStream = std::mt19937_64;

/// SplitMix64 finaliser (Steele, Lea and Flood).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stream for replica `replica_index` of an experiment seeded with
/// `master_seed`. The engine seed is
///   splitmix64_mix(splitmix64_mix(master_seed) ^ splitmix64_mix(~replica_index))
/// so equal inputs give equal streams and neighbouring indices are decorrelated.
RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t replica_index);

inline double uniform01(RandomStream& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace loopfield
