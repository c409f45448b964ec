#pragma once

#include <cstdint>
#include <random>

namespace ggs {

// splitmix64 step; used to derive independent per-trial streams from
// (seed, trial index) so parallel trials stay reproducible.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t trial_stream_seed(std::uint64_t seed, std::uint64_t trial_index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(trial_index + 0x51a9b2c3d4e5f607ULL));
}

// Implementation-independent uniform in [0, 1).
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace ggs
