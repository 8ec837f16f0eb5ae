#pragma once

#include <array>
#include <cstdint>

namespace quadlab {

// Philox-2x64-10 (Salmon, Moraes, Dror, Shaw: "Parallel random numbers: as easy
// as 1, 2, 3"). A pure function from (counter, key) to 128 bits, which is
// exactly the shape Monte Carlo needs for reproducibility: sample i and prime
// ordinal j address their uniform directly, so generation order and thread
// partitioning cannot change the stream. Ten rounds is the authors'
// recommendation with safety margin (Crush-resistant at seven).
namespace philox_detail {
constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ULL;   // round multiplier
constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;  // golden-ratio key bump

inline void round_once(std::uint64_t& x0, std::uint64_t& x1, std::uint64_t key) {
    __uint128_t prod = static_cast<__uint128_t>(kMul) * x0;
    std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
    std::uint64_t lo = static_cast<std::uint64_t>(prod);
    x0 = hi ^ key ^ x1;
    x1 = lo;
}
} // namespace philox_detail

inline std::array<std::uint64_t, 2>
philox2x64(std::uint64_t ctr0, std::uint64_t ctr1, std::uint64_t key) {
    std::uint64_t x0 = ctr0, x1 = ctr1;
    for (int r = 0; r < 10; ++r) {
        philox_detail::round_once(x0, x1, key);
        key += philox_detail::kWeyl;
    }
    return {x0, x1};
}

// SplitMix64 finalizer: used for cheap decorrelated hashing (audit subsampling),
// not for the Monte Carlo stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace quadlab
