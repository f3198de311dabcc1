#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ssc {

// Reproducibility contract: every random quantity in this library is produced
// by mt19937_64 (whose output sequence is fixed by the C++ standard) combined
// with the hand-rolled uniform and normal transforms below. Nothing touches
// std::uniform_real_distribution or std::normal_distribution, whose output is
// implementation-defined, so a seed yields the same stream on every platform.

/// One step of the SplitMix64 sequence. Used to derive independent stream
/// seeds from a single master seed.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for sub-stream `k` of `master`: the (k+1)-th SplitMix64 output.
/// Streams with distinct k are decorrelated, so parallel consumers (one per
/// Monte Carlo replication, say) can draw without coordination.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t k) {
    std::uint64_t state = master;
    std::uint64_t out = 0;
    for (std::uint64_t i = 0; i <= k; ++i) out = splitmix64_next(state);
    return out;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform draw on [0, 1) with 53 random mantissa bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
        double u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double normal(double sd) { return sd * normal(); }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ssc
