#pragma once

#include <cmath>
#include <cstdint>

namespace rmsup {

/// Fixed 64-bit generator (splitmix64) so seeded corpora reproduce across
/// platforms and language ports. Update constants:
///   state += 0x9E3779B97F4A7C15
///   z = state; z ^= z>>30; z *= 0xBF58476D1CE4E5B9
///   z ^= z>>27; z *= 0x94D049BB133111EB; z ^= z>>31
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1) with 53 random bits.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [lo, hi] inclusive.
    int next_int(int lo, int hi) {
        return lo + int(next_double() * double(hi - lo + 1));
    }

    /// Standard normal via Box-Muller (the first of the pair).
    double next_normal() {
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace rmsup
