#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace gridsim {

// Counter-derived xoshiro256++ stream. Self-contained so that results do not
// depend on the standard library's distribution implementations, and streams
// derived from (root, a, b) are reproducible regardless of which worker
// thread consumes them.
//
// Every sampling helper consumes a fixed number of raw draws, so two streams
// with the same seed stay in lockstep even when sample values differ. This is
// what makes fleet prefixes identical across penetration levels under common
// random numbers.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            word = splitmix64(x);
        }
    }

    // Deterministic child stream keyed by two indices (e.g. penetration
    // level and scenario index).
    static RngStream derive(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) {
        std::uint64_t x = root + 0x9e3779b97f4a7c15ULL + a;
        x = splitmix64(x);
        x += 0x9e3779b97f4a7c15ULL + b;
        x = splitmix64(x);
        return RngStream(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0,1), 53-bit resolution. One raw draw.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Gaussian via Box-Muller. Exactly two raw draws, no spare caching.
    double normal(double mean, double stddev) {
        // Midpoint offset keeps u1 strictly inside (0,1) with a fixed draw count.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Index drawn proportionally to nonnegative weights. One raw draw.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        const double u = uniform01() * total;
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] > 0.0) last_positive = i;
            acc += weights[i];
            if (u < acc) return i;
        }
        return last_positive;
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace gridsim
