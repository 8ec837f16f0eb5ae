#pragma once

#include <cstdint>
#include <utility>

namespace quadlab {

// Kronecker symbol (a|n) for arbitrary a and n >= 0, as a total function:
//   (a|0) = 1 iff |a| = 1, else 0;
//   (a|2) = 0 for even a, +1 for a = ±1 (mod 8), −1 for a = ±3 (mod 8);
//   (a|p) = Legendre symbol for odd prime p;
//   completely multiplicative in n.
// The algorithm is the usual binary-GCD-flavored Jacobi evaluation: strip twos
// (each costs a factor (a|2) read off a mod 8), then alternate quadratic
// reciprocity swaps with reductions. Reciprocity for odd positive a, n flips
// the sign iff both are 3 mod 4; (−1|n) flips iff n is 3 mod 4. Runs in
// O(log a log n) with no divisions besides the reductions.
namespace kronecker_detail {

// The reduction loop, templated so the caller can drop to 32-bit arithmetic:
// the sweep calls this ~10^9 times with prime moduli < 2^32, and 32-bit
// divides are measurably cheaper than 64-bit ones there.
template <class U>
inline int jacobi_loop(U u, U n, int sign) {
    while (u != 0) {
        while ((u & 1) == 0) {
            u >>= 1;
            U r = n & 7;
            if (r == 3 || r == 5) sign = -sign;
        }
        // Both odd: reciprocity, then reduce.
        std::swap(u, n);
        if ((u & 3) == 3 && (n & 3) == 3) sign = -sign;
        u %= n;
    }
    return n == 1 ? sign : 0;
}

} // namespace kronecker_detail

inline int kronecker(std::int64_t a, std::uint64_t n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    bool aEven = (a & 1) == 0;
    if (aEven && (n & 1) == 0) return 0;

    int sign = 1;
    // Factors of 2 in n contribute (a|2) each; a is odd here if any exist.
    if ((n & 1) == 0) {
        int twos = 0;
        while ((n & 1) == 0) { n >>= 1; ++twos; }
        if (twos & 1) {
            int r = static_cast<int>(((a % 8) + 8) & 7);
            if (r == 3 || r == 5) sign = -sign;
        }
    }
    // n is odd now. Pull the sign of a through (−1|n).
    std::uint64_t u;
    if (a < 0) {
        if (n % 4 == 3) sign = -sign;
        u = static_cast<std::uint64_t>(-(a + 1)) + 1;  // |a| without UB at INT64_MIN
    } else {
        u = static_cast<std::uint64_t>(a);
    }
    u %= n;
    if (n >> 32)
        return kronecker_detail::jacobi_loop<std::uint64_t>(u, n, sign);
    return kronecker_detail::jacobi_loop<std::uint32_t>(
        static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(n), sign);
}

} // namespace quadlab
