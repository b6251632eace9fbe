#pragma once

// Seeded randomness with results that do not depend on the standard
// library implementation (std::*_distribution output is unspecified).

#include <cstdint>
#include <random>
#include <string_view>

namespace regkit::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives an independent stream seed from a master seed and cell coordinates.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t v) { return splitmix64(seed ^ splitmix64(v)); }

/// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_below(std::mt19937_64& g, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do v = g();
    while (v >= limit);
    return v % n;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace regkit::rng
