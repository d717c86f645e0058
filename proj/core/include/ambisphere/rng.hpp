#pragma once

#include <cstdint>

namespace ambisphere {

/// SplitMix64. Fixed algorithm so seeded weights are bit-identical across
/// platforms and languages.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }
};

/// One SplitMix64 scramble step, used to derive independent sub-streams from
/// a user seed and a fixed salt.
inline uint64_t derive_seed(uint64_t seed, uint64_t salt) {
    SplitMix64 rng(seed ^ salt);
    return rng.next();
}

}  // namespace ambisphere
