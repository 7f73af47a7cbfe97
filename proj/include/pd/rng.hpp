#pragma once

#include <cstdint>
#include <random>

namespace pd {

// splitmix64 mixing step; used to derive decorrelated child seeds from a
// master seed so that replicate r is reproducible regardless of how many
// replicates run or in what order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// Uniform draw on the open interval (0, 1) built directly from the top 53
// bits of the generator output. Unlike std::uniform_real_distribution this
// is bit-identical across standard library implementations, and it never
// returns 0 or 1, so it is safe to feed into quantile functions.
inline double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace pd
