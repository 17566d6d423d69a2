#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace coda {

// Splittable 64-bit generator (splitmix64). Streams are derived by hashing
// a (seed, key1, key2) triple, so each replicate gets its own generator and
// results do not depend on evaluation order or thread schedule.
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : state_(seed) {}

    // Independent stream for a (seed, key1, key2) triple.
    static SeededRng derive(std::uint64_t seed, std::uint64_t key1, std::uint64_t key2) {
        std::uint64_t s = mix(seed + 0x9E3779B97F4A7C15ULL);
        s = mix(s ^ (key1 + 0xBF58476D1CE4E5B9ULL));
        s = mix(s ^ (key2 + 0x94D049BB133111EBULL));
        return SeededRng(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform integer in [0, bound), bound > 0. Rejection sampling keeps the
    // draw unbiased while staying fully deterministic.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound; // 2^64 mod bound
        for (;;) {
            const std::uint64_t v = next_u64();
            if (v >= threshold) return v % bound;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (cosine branch only; no hidden state).
    double next_gaussian() {
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace coda
