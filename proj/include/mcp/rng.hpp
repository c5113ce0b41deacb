#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mcp {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to fan one scenario seed out to per-actor streams.
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t base, uint64_t tag) {
    return mix64(base ^ mix64(tag));
}

// Portable draws. std::uniform_int_distribution is implementation-defined,
// which would break golden traces across standard libraries.
inline uint64_t rand_below(Rng& g, uint64_t n) {
    return n == 0 ? 0 : g() % n;
}

// Inclusive range.
inline uint64_t rand_range(Rng& g, uint64_t lo, uint64_t hi) {
    return lo + rand_below(g, hi - lo + 1);
}

inline double rand_unit(Rng& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline bool rand_bernoulli(Rng& g, double p) {
    return rand_unit(g) < p;
}

inline double rand_gauss(Rng& g) {
    // Box-Muller, one value per call.
    double u1 = rand_unit(g);
    double u2 = rand_unit(g);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace mcp
