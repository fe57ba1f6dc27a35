#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ggbm {

/// SplitMix64 step: advances state, returns the next output. Bijective in
/// the state, so distinct states give distinct outputs.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic per-stream random source: a Mersenne engine seeded by
/// mixing (seed, stream_index) through SplitMix64. Stream i is the same no
/// matter which worker draws it, which is what makes ensembles byte-stable
/// under any thread count.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t stream_index) {
        std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (stream_index + 1));
        engine_.seed(splitmix64(s));
    }

    /// Uniform on the open interval (0,1): (k + 1/2) / 2^53, never 0 or 1.
    double uniform01() {
        const std::uint64_t k = engine_() >> 11;
        return (static_cast<double>(k) + 0.5) * 0x1p-53;
    }

    /// Standard normal by the Marsaglia polar method; pairs are cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Exponential with unit rate.
    double exponential() { return -std::log(uniform01()); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace ggbm
