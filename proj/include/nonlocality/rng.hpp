// rng.hpp
// Counter-based splittable random stream for Monte Carlo sampling. Trial t
// of a run draws from a stream keyed on (seed, t), so records are bit-stable
// under any generation order and trials can be produced in parallel.

#pragma once

#include <cstdint>

namespace nonlocality {

// splitmix64 output finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class TrialRng {
  public:
    TrialRng(std::uint64_t seed, std::uint64_t trial)
        : state_(mix64(mix64(seed) ^ mix64(trial ^ 0xA3C59AC2ED9E86D4ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 significant bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

}  // namespace nonlocality
