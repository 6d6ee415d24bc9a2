#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random number generation. Every draw is a pure function of
// (seed, counter), so filling a matrix is reproducible regardless of platform
// word order, call interleaving, or thread count, and substreams can be
// derived for ensembles without coordination.

namespace specbudget::rng {

// SplitMix64 finalizer (Steele/Lea/Flood). Full 64-bit avalanche.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Word `counter` of the stream identified by `seed`.
constexpr std::uint64_t word_at(std::uint64_t seed, std::uint64_t counter) noexcept {
    return splitmix64(splitmix64(seed) + counter);
}

// Independent child seed for substream `index`.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) ^ (0xA0761D6478BD642Full + index));
}

// Uniform draw in (0, 1]; never returns 0, so log() is safe.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) noexcept {
    return static_cast<double>((word_at(seed, counter) >> 11) + 1) * 0x1.0p-53;
}

namespace detail {
inline constexpr double two_pi = 6.283185307179586476925286766559;
}

// Standard-normal fill via Box-Muller, consuming counters [0, size) of the
// stream and emitting both values of each transform pair.
inline void fill_standard_normal(double* out, std::uint64_t size, std::uint64_t seed) noexcept {
    std::uint64_t i = 0;
    for (; i + 1 < size; i += 2) {
        const double u1 = uniform01(seed, i);
        const double u2 = uniform01(seed, i + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        out[i] = r * std::cos(detail::two_pi * u2);
        out[i + 1] = r * std::sin(detail::two_pi * u2);
    }
    if (i < size) {
        const double u1 = uniform01(seed, i);
        const double u2 = uniform01(seed, i + 1);
        out[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(detail::two_pi * u2);
    }
}

} // namespace specbudget::rng
