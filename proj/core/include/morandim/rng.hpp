#ifndef MORANDIM_RNG_HPP
#define MORANDIM_RNG_HPP

#include <cstdint>

namespace morandim::rng {

// Counter-based pseudo-random primitives. Everything downstream derives
// its randomness from (seed, index) pairs through these mixers, so results
// are reproducible bit-for-bit across platforms and independent of call
// order. Parallel callers own disjoint streams by deriving per-task seeds.

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Combines two 64-bit values into a well-mixed 64-bit value.
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + kGolden + (a << 6) + (a >> 2)));
}

inline std::uint64_t mix3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix(mix(a, b), c);
}

/// Uniform double in [0, 1) from 64 random bits (53-bit mantissa).
inline double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Seed for the index-th independent substream of `seed`.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return mix(splitmix64(seed), index);
}

} // namespace morandim::rng

#endif
