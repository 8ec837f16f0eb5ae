#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "quadlab/errors.hpp"
#include "quadlab/format.hpp"
#include "quadlab/kronecker.hpp"
#include "quadlab/parallel.hpp"

namespace quadlab {

// A fundamental discriminant is d = 1 or the discriminant of a quadratic field:
// either d ≡ 1 (mod 4) and squarefree, or d = 4m with m ≡ 2 or 3 (mod 4) and
// m squarefree. d = 1 (the trivial character) is kept by default; the family
// options below can exclude it.
struct FamilyOptions {
    bool includeD1 = true;
    std::uint64_t memoryBudgetBytes = 2ULL << 30;  // sieve ceiling
};

namespace discriminant_detail {

inline bool squarefree_u64(std::uint64_t m) {
    if (m == 0) return false;
    for (std::uint64_t p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p) continue;
        m /= p;
        if (m % p == 0) return false;
    }
    return true;
}

// Euclidean-style mod that always lands in [0, k).
inline std::int64_t floored_mod(std::int64_t a, std::int64_t k) {
    std::int64_t r = a % k;
    return r < 0 ? r + k : r;
}

} // namespace discriminant_detail

inline bool is_fundamental_discriminant(std::int64_t d) {
    using namespace discriminant_detail;
    if (d == 0) return false;
    std::int64_t r4 = floored_mod(d, 4);
    if (r4 == 1) return squarefree_u64(static_cast<std::uint64_t>(std::llabs(d)));
    if (r4 != 0) return false;
    std::int64_t m = d / 4;
    std::int64_t m4 = floored_mod(m, 4);
    if (m4 != 2 && m4 != 3) return false;
    return squarefree_u64(static_cast<std::uint64_t>(std::llabs(m)));
}

// All fundamental discriminants with |d| <= N, sorted by |d| with the positive
// one first on ties (only ±4m pairs can tie). Squarefree flags come from one
// pass striking p^2 multiples; the family is then read off in two sweeps
// (odd d ≡ 1 mod 4 of both signs, then d = 4m). The count behaves like
// (6/π²)·N ≈ 0.6079·N.
inline std::vector<std::int64_t>
enumerate_family(std::int64_t N, const FamilyOptions& opts = {}) {
    if (N < 1) throw config_error("N: must be >= 1, got " + std::to_string(N));
    std::uint64_t sieveBytes = static_cast<std::uint64_t>(N) + 1;
    if (opts.memoryBudgetBytes && sieveBytes > opts.memoryBudgetBytes)
        throw resource_error("enumerate_family: sieve of " +
                             std::to_string(sieveBytes) +
                             " bytes exceeds memoryBudgetBytes=" +
                             std::to_string(opts.memoryBudgetBytes));

    std::vector<std::uint8_t> notSquarefree(static_cast<size_t>(N) + 1, 0);
    for (std::int64_t p = 2; p * p <= N; ++p) {
        std::int64_t pp = p * p;
        // Composite p just re-strikes struck positions; harmless and branch-free.
        for (std::int64_t q = pp; q <= N; q += pp) notSquarefree[q] = 1;
    }
    auto squarefree = [&](std::int64_t v) { return !notSquarefree[v]; };

    std::vector<std::int64_t> family;
    family.reserve(static_cast<size_t>(0.62 * static_cast<double>(N)) + 8);
    for (std::int64_t a = 1; a <= N; ++a) {
        if (!squarefree(a)) continue;
        if (a % 4 == 1) family.push_back(a);        //  a ≡ 1 (mod 4)
        else if (a % 4 == 3) family.push_back(-a);  // −a ≡ 1 (mod 4)
    }
    for (std::int64_t u = 1; 4 * u <= N; ++u) {
        if (!squarefree(u)) continue;
        std::int64_t r = u % 4;
        if (r == 2 || r == 3) family.push_back(4 * u);   // m = u ≡ 2,3 (mod 4)
        if (r == 1 || r == 2) family.push_back(-4 * u);  // m = −u ≡ 2,3 (mod 4)
    }
    if (!opts.includeD1)
        family.erase(std::remove(family.begin(), family.end(), 1), family.end());

    std::sort(family.begin(), family.end(), [](std::int64_t x, std::int64_t y) {
        std::int64_t ax = std::llabs(x), ay = std::llabs(y);
        if (ax != ay) return ax < ay;
        return x > y;
    });
    return family;
}

// Text format: "N=<N> count=<count>" header, then one signed decimal per line
// in family order.
inline std::string family_to_text(std::int64_t N,
                                  const std::vector<std::int64_t>& family) {
    std::string body = "N=" + std::to_string(N) +
                       " count=" + std::to_string(family.size()) + "\n";
    for (std::int64_t d : family) body += std::to_string(d) + "\n";
    return body;
}

inline void save_family(const std::string& path, std::int64_t N,
                        const std::vector<std::int64_t>& family) {
    write_text_file(path, family_to_text(N, family));
}

struct FamilyFile {
    std::int64_t N = 0;
    std::vector<std::int64_t> family;
};

inline FamilyFile load_family(const std::string& path) {
    std::string text = read_text_file(path);
    FamilyFile f;
    size_t pos = text.find('\n');
    if (pos == std::string::npos)
        throw config_error("family file: missing header line in " + path);
    std::string header = text.substr(0, pos);
    std::uint64_t count = 0;
    if (std::sscanf(header.c_str(), "N=%lld count=%llu",
                    reinterpret_cast<long long*>(&f.N),
                    reinterpret_cast<unsigned long long*>(&count)) != 2)
        throw config_error("family file: bad header '" + header + "' in " + path);
    f.family.reserve(count);
    size_t lineStart = pos + 1;
    while (lineStart < text.size()) {
        size_t lineEnd = text.find('\n', lineStart);
        if (lineEnd == std::string::npos) lineEnd = text.size();
        if (lineEnd > lineStart)
            f.family.push_back(
                parse_int(text.substr(lineStart, lineEnd - lineStart), "family entry"));
        lineStart = lineEnd + 1;
    }
    if (f.family.size() != count)
        throw config_error("family file: header count " + std::to_string(count) +
                           " != " + std::to_string(f.family.size()) +
                           " entries in " + path);
    return f;
}

// Mean of χ_D(n) over the family. The summands are exactly −1/0/+1, so the
// numerator is accumulated as an integer: the mean is exact to one final
// division regardless of thread count or order. For square n this estimates
// ∏_{p|n} p/(p+1); for non-square n it decays like N^{-1/2}.
inline double character_average(std::uint64_t n,
                                const std::vector<std::int64_t>& family,
                                int threads = 0) {
    if (family.empty()) throw config_error("character_average: empty family");
    int T = resolve_threads(threads);
    std::vector<std::int64_t> partial(static_cast<size_t>(T), 0);
    std::int64_t count = static_cast<std::int64_t>(family.size());
    parallel_for(T, T, [&](std::int64_t t) {
        std::int64_t lo = count * t / T, hi = count * (t + 1) / T;
        std::int64_t acc = 0;
        for (std::int64_t i = lo; i < hi; ++i)
            acc += kronecker(family[static_cast<size_t>(i)], n);
        partial[static_cast<size_t>(t)] = acc;
    });
    std::int64_t total = 0;
    for (std::int64_t v : partial) total += v;
    return static_cast<double>(total) / static_cast<double>(count);
}

} // namespace quadlab
