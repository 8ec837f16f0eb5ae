#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "quadlab/errors.hpp"
#include "quadlab/primes.hpp"

namespace quadlab {

// Λ(n) = log p when n = p^j, 0 otherwise.
inline double von_mangoldt(std::uint64_t n) {
    if (n < 2) return 0.0;
    auto f = factorize(n);
    if (f.size() != 1) return 0.0;
    return std::log(static_cast<double>(f[0].first));
}

struct PrimePower {
    std::uint64_t q;  // p^j
    std::uint32_t p;
    double logp;
};

// Support of Λ up to limit, ascending in q. Size is ~ π(limit) + O(sqrt(limit)).
inline std::vector<PrimePower> prime_powers_up_to(std::uint64_t limit) {
    std::vector<PrimePower> out;
    auto ps = primes_up_to(limit);
    out.reserve(ps.size() + 64);
    for (std::uint32_t p : ps) {
        double lp = std::log(static_cast<double>(p));
        for (std::uint64_t q = p; q <= limit; ) {
            out.push_back({q, p, lp});
            if (q > limit / p) break;
            q *= p;
        }
    }
    std::sort(out.begin(), out.end(),
              [](const PrimePower& a, const PrimePower& b) { return a.q < b.q; });
    return out;
}

// Dense tables of the convolution powers Λ_k = Λ ∗ ... ∗ Λ (k factors), i.e.
// Λ_k(n) = Σ_{n_1···n_k = n} Λ(n_1)···Λ(n_k) over ordered tuples. These are the
// Dirichlet coefficients of (−L′/L)^k. Built by convolving the previous row
// against the sparse prime-power support, so row k costs about
// limit·Σ_{q≤limit} 1/q ≈ 3·limit adds at limit = 10^6.
class LambdaTable {
public:
    LambdaTable(std::uint64_t limit, int maxK,
                std::uint64_t memoryBudgetBytes = 2ULL << 30)
        : limit_(limit), maxK_(maxK) {
        if (limit < 1) throw config_error("lambda: must be >= 1");
        if (maxK < 1) throw config_error("k: must be >= 1, got " + std::to_string(maxK));
        std::uint64_t bytes =
            static_cast<std::uint64_t>(maxK) * (limit + 1) * sizeof(double);
        if (memoryBudgetBytes && bytes > memoryBudgetBytes)
            throw resource_error("LambdaTable: " + std::to_string(bytes) +
                                 " bytes for k<=" + std::to_string(maxK) +
                                 ", n<=" + std::to_string(limit) +
                                 " exceeds memoryBudgetBytes=" +
                                 std::to_string(memoryBudgetBytes));

        auto qs = prime_powers_up_to(limit);
        rows_.assign(static_cast<size_t>(maxK),
                     std::vector<double>(static_cast<size_t>(limit) + 1, 0.0));
        for (const auto& pp : qs) rows_[0][static_cast<size_t>(pp.q)] = pp.logp;
        for (int k = 1; k < maxK; ++k) {
            const auto& prev = rows_[static_cast<size_t>(k - 1)];
            auto& next = rows_[static_cast<size_t>(k)];
            for (const auto& pp : qs) {
                std::uint64_t dmax = limit / pp.q;
                for (std::uint64_t d = 2; d <= dmax; ++d) {
                    double v = prev[static_cast<size_t>(d)];
                    if (v != 0.0) next[static_cast<size_t>(pp.q * d)] += pp.logp * v;
                }
            }
        }
    }

    std::uint64_t limit() const { return limit_; }
    int max_k() const { return maxK_; }

    double lambda_k(int k, std::uint64_t n) const {
        if (k < 1 || k > maxK_)
            throw config_error("k: out of table range 1.." + std::to_string(maxK_));
        if (n > limit_)
            throw cutoff_error("n: " + std::to_string(n) + " exceeds table limit " +
                               std::to_string(limit_));
        return rows_[static_cast<size_t>(k - 1)][static_cast<size_t>(n)];
    }

    const std::vector<double>& row(int k) const {
        if (k < 1 || k > maxK_)
            throw config_error("k: out of table range 1.." + std::to_string(maxK_));
        return rows_[static_cast<size_t>(k - 1)];
    }

private:
    std::uint64_t limit_;
    int maxK_;
    std::vector<std::vector<double>> rows_;
};

} // namespace quadlab
