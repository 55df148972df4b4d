#pragma once

#include <cstdint>
#include <random>

namespace pdqp {

/// All randomness flows through an explicitly injected generator, so a whole
/// experiment replays from (seed, trial index).
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Generator for one independent stream, derived from an experiment seed and
/// a stream index (typically the trial number).
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(splitmix64(splitmix64(seed) ^ (stream + 0x5851f42d4c957f2dULL)));
}

inline double uniform_unit(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

} // namespace pdqp
