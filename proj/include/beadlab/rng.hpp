#pragma once

#include <cstdint>
#include <random>

namespace beadlab {

using Rng = std::mt19937_64;

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Replica i of a run seeded with base uses seed base ^ i; the generator state
// is derived from it through splitmix64 so neighboring seeds decorrelate.
inline uint64_t replica_seed(uint64_t base, uint64_t i) { return base ^ i; }

inline Rng make_rng(uint64_t seed) {
  std::seed_seq seq{static_cast<uint32_t>(splitmix64(seed)),
                    static_cast<uint32_t>(splitmix64(seed) >> 32),
                    static_cast<uint32_t>(splitmix64(seed + 1)),
                    static_cast<uint32_t>(splitmix64(seed + 1) >> 32)};
  return Rng(seq);
}

// Uniform integer in [0, n).
inline int64_t uniform_below(Rng& rng, int64_t n) {
  return std::uniform_int_distribution<int64_t>(0, n - 1)(rng);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace beadlab
