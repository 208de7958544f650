// Portable deterministic random numbers. The standard distributions are
// implementation-defined, so uniforms and normals are derived here from
// splitmix64 to keep outputs identical across toolchains.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gms {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Uniform in [0, 1) with 53 random bits.
inline double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Stateless draw keyed by (seed, stream, index); any evaluation order gives
/// the same values.
inline std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) + index);
}

inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return to_unit(counter_bits(seed, stream, index));
}

/// Standard normal via Box-Muller from two counter draws.
inline double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const double u1 = 1.0 - counter_uniform(seed, stream, 2 * index);     // (0, 1]
    const double u2 = counter_uniform(seed, stream, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential generator for single-threaded experiments.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}
    double uniform() { return counter_uniform(seed_, stream_, next_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return counter_normal(seed_, stream_ ^ 0xA5A5A5A5ULL, next_++); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t next_ = 0;
};

} // namespace gms
