#pragma once

#include <cstdint>
#include <random>

namespace medlab {

/// splitmix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of an independent stream `stream` derived from an experiment seed.
/// Replicate r of an experiment with seed s always draws from
/// derive_seed(s, r), whatever the thread schedule.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine(derive_seed(seed, stream));
}

/// Uniform draw in the open interval (0,1) with 53 random bits.
inline double open_unit(Engine& eng) {
  return (double(eng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace medlab
