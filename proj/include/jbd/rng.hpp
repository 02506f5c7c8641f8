// Tiny deterministic RNG used wherever the library needs reproducible
// pseudo-random values. Stateless: every draw is keyed by (seed, counter),
// so identical call sequences give identical streams on every platform.
#pragma once

#include <cstdint>

namespace jbd {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(
             splitmix64(seed ^ (counter * 0x2545f4914f6cdd1dULL)) >> 11) *
         0x1.0p-53;
}

}  // namespace jbd
