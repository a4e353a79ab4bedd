#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace symfact {

// All stochastic pieces of the library draw from this engine so that a seed
// reproduces a run bit-for-bit. The distributions below are written out
// instead of using <random> distributions, whose output is implementation
// defined.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Standard normal by Box-Muller; consumes two draws per call.
inline double normal(Rng& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace symfact
