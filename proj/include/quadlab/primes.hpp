#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quadlab/errors.hpp"

namespace quadlab {

// Plain Eratosthenes over a byte array. The byte-per-number layout is
// deliberately boring: the sieves here top out at ~10^7 (the lambda cap), where
// clarity beats the 8x memory of a bitset. `budgetBytes` is the caller's memory
// ceiling; pass 0 for "no limit".
inline std::vector<std::uint32_t>
primes_up_to(std::uint64_t n, std::uint64_t budgetBytes = 0) {
    if (n >= (1ULL << 32))
        throw resource_error("primes_up_to: bound " + std::to_string(n) +
                             " exceeds the supported 2^32 range");
    if (budgetBytes && n + 1 > budgetBytes)
        throw resource_error("primes_up_to: sieve of " + std::to_string(n + 1) +
                             " bytes exceeds budget of " +
                             std::to_string(budgetBytes));
    std::vector<std::uint32_t> out;
    if (n < 2) return out;
    std::vector<std::uint8_t> composite(n + 1, 0);
    for (std::uint64_t p = 2; p * p <= n; ++p)
        if (!composite[p])
            for (std::uint64_t q = p * p; q <= n; q += p) composite[q] = 1;
    for (std::uint64_t p = 2; p <= n; ++p)
        if (!composite[p]) out.push_back(static_cast<std::uint32_t>(p));
    return out;
}

// Smallest-prime-factor table, spf[n] = least prime dividing n (spf[0] =
// spf[1] = 0). Lets callers expand a completely multiplicative function over
// all n <= limit in one multiply per value.
inline std::vector<std::uint32_t>
spf_table(std::uint64_t limit, std::uint64_t budgetBytes = 0) {
    if (limit >= (1ULL << 32))
        throw resource_error("spf_table: bound " + std::to_string(limit) +
                             " exceeds the supported 2^32 range");
    std::uint64_t bytes = (limit + 1) * sizeof(std::uint32_t);
    if (budgetBytes && bytes > budgetBytes)
        throw resource_error("spf_table: " + std::to_string(bytes) +
                             " bytes exceeds budget of " +
                             std::to_string(budgetBytes));
    std::vector<std::uint32_t> spf(static_cast<size_t>(limit) + 1, 0);
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (spf[p]) continue;
        for (std::uint64_t m = p; m <= limit; m += p)
            if (!spf[m]) spf[m] = static_cast<std::uint32_t>(p);
    }
    return spf;
}

namespace primes_detail {
inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}
inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}
} // namespace primes_detail

// Deterministic Miller-Rabin. The 12-base set below is a proven witness set for
// all n < 2^64 (Sorenson-Webster), so this is exact, not probabilistic.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL,
                            19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL,
                            19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = primes_detail::powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = primes_detail::mulmod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

// Factorization by trial division; adequate for the operand sizes the model
// ops see (n up to ~10^12 in tests). Exponent-carrying pairs, ascending p.
inline std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, int>> fs;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        fs.emplace_back(p, e);
    }
    if (n > 1) fs.emplace_back(n, 1);
    return fs;
}

} // namespace quadlab
