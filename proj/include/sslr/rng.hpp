#pragma once

#include <cstdint>

namespace sslr {

/// Counter-based pseudorandom source. Every draw is a pure function of
/// (seed, iteration, sample, dim), so parallel sample evaluation in any order
/// reproduces exactly the sequential stream, and skipping ahead is free.
namespace rng {

inline std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t chain(std::uint64_t h, std::uint64_t v) {
    return mix(h + 0x9e3779b97f4a7c15ULL * (v + 1));
}

/// Uniform draw in [0, 1) with 53 random mantissa bits.
inline double uniform(std::uint64_t seed, std::uint64_t iteration, std::uint64_t sample,
                      std::uint64_t dim) {
    std::uint64_t h = chain(mix(seed), iteration);
    h = chain(h, sample);
    h = chain(h, dim);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::uint64_t seed, std::uint64_t iteration, std::uint64_t sample,
                         std::uint64_t dim, double lo, double hi) {
    return lo + uniform(seed, iteration, sample, dim) * (hi - lo);
}

} // namespace rng

} // namespace sslr
