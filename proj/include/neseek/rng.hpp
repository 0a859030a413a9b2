#pragma once

#include <cstdint>
#include <random>

namespace neseek {

// Uniform double in [lo, hi) built from the top 53 bits of the generator
// output. std::uniform_real_distribution is implementation-defined, so this
// hand-rolled mapping keeps streams byte-identical across platforms.
inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

}  // namespace neseek
