#pragma once

#include <cstdint>
#include <random>

namespace sdc {

using Rng = std::mt19937_64;

// splitmix64 finalizer; bijective on uint64 with full avalanche.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream-splitting rule: stream i of a master seed is seeded with
// splitmix64(seed XOR golden_gamma * (i + 1)). Trials indexed this way
// produce the same values whether executed serially or across workers.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial_index) {
    return Rng(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (trial_index + 1))));
}

// Uniform double on the open interval (0,1).
inline double uniform_open01(Rng& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double u = dist(rng);
    while (u <= 0.0) u = dist(rng);
    return u;
}

} // namespace sdc
