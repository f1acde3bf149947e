#pragma once

#include <cstdint>
#include <random>

namespace fperiod {

// splitmix64, used to derive well-separated seeds for per-block streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent RNG stream for block `block` of a run seeded with `seed`.
// Streams are deterministic and independent of thread count, so parallel
// Monte Carlo loops indexed by block reproduce bit-exactly.
inline std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(block + 0x51ed2701a7b5e0f3ULL));
    return std::mt19937_64(s);
}

}  // namespace fperiod
