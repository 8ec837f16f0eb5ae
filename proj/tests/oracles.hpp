#pragma once

// Independent reference implementations for the test suite. Everything here
// favors being obviously correct over being fast: definitional formulas,
// brute-force enumerations, no shared code with the library paths under test.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

// Legendre symbol by Euler's criterion: a^((p-1)/2) mod p.
inline int legendre(std::int64_t a, std::uint64_t p) {
    std::uint64_t r = a % static_cast<std::int64_t>(p);
    std::uint64_t base = (r + p) % p;
    if (base == 0) return 0;
    std::uint64_t e = (p - 1) / 2;
    __uint128_t acc = 1, b = base;
    while (e) {
        if (e & 1) acc = (acc * b) % p;
        b = (b * b) % p;
        e >>= 1;
    }
    return acc == 1 ? 1 : -1;
}

// Kronecker symbol from the definition: factor n, multiply Legendre symbols,
// with the 2 and 0 and sign conventions spelled out case by case.
inline int kronecker_definitional(std::int64_t a, std::uint64_t n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int result = 1;
    // (a | 2) per the mod-8 table.
    while (n % 2 == 0) {
        if (a % 2 == 0) return 0;
        std::int64_t r = ((a % 8) + 8) % 8;
        if (r == 3 || r == 5) result = -result;
        n /= 2;
    }
    for (std::uint64_t p = 3; p * p <= n; p += 2) {
        while (n % p == 0) {
            result *= legendre(a, p);
            if (result == 0) return 0;
            n /= p;
        }
    }
    if (n > 1) result *= legendre(a, n);
    return result;
}

// Fundamental discriminant by the definition, with naive squarefree testing.
inline bool is_fundamental_definitional(std::int64_t d) {
    if (d == 0) return false;
    auto squarefree = [](std::int64_t m) {
        if (m < 0) m = -m;
        for (std::int64_t f = 2; f * f <= m; ++f)
            if (m % (f * f) == 0) return false;
        return true;
    };
    std::int64_t mod4 = ((d % 4) + 4) % 4;
    if (mod4 == 1) return squarefree(d);
    if (mod4 != 0) return false;
    std::int64_t m = d / 4;
    std::int64_t m4 = ((m % 4) + 4) % 4;
    return (m4 == 2 || m4 == 3) && squarefree(m);
}

inline double von_mangoldt_definitional(std::uint64_t n) {
    if (n < 2) return 0.0;
    for (std::uint64_t p = 2; p <= n; ++p) {
        if (n % p) continue;
        // p is the smallest divisor > 1, hence prime.
        std::uint64_t m = n;
        while (m % p == 0) m /= p;
        return m == 1 ? std::log(double(p)) : 0.0;
    }
    return 0.0;
}

// Lambda_k(n) as a literal sum over ordered factorizations n = d * e with
// Lambda_{k-1}(d) Lambda(e).
inline double lambda_k_definitional(int k, std::uint64_t n) {
    if (k == 1) return von_mangoldt_definitional(n);
    double total = 0.0;
    for (std::uint64_t d = 1; d <= n; ++d) {
        if (n % d) continue;
        double a = lambda_k_definitional(k - 1, d);
        if (a == 0.0) continue;
        total += a * von_mangoldt_definitional(n / d);
    }
    return total;
}

// Exact k-th model moment by brute force over ordered k-tuples of prime powers
// q_i <= lambda. E[prod X_{q_i}] = prod over primes of E[X_p^(sum of exponents)]
// with E[X^even>0] = p/(p+1), E[X^odd] = 0. Feasible for lambda <= 30, k <= 4.
inline double exact_moment_bruteforce(int k, double epsilon, double lambda) {
    std::vector<std::uint64_t> qs;      // prime powers <= lambda
    std::vector<std::uint64_t> qPrime;  // their primes
    std::vector<double> qWeight;        // Lambda(q) q^(-s)
    double s = 0.5 + epsilon;
    for (std::uint64_t n = 2; double(n) <= lambda; ++n) {
        // smallest prime factor and prime-power test, as above
        std::uint64_t p = n;
        for (std::uint64_t f = 2; f * f <= n; ++f)
            if (n % f == 0) { p = f; break; }
        std::uint64_t m = n;
        while (m % p == 0) m /= p;
        if (m != 1) continue;
        qs.push_back(n);
        qPrime.push_back(p);
        qWeight.push_back(std::log(double(p)) * std::pow(double(n), -s));
    }
    size_t Q = qs.size();
    std::vector<size_t> idx(static_cast<size_t>(k), 0);
    double total = 0.0;
    while (true) {
        double w = 1.0;
        std::map<std::uint64_t, int> expSum;  // prime -> total exponent
        for (int i = 0; i < k; ++i) {
            size_t t = idx[static_cast<size_t>(i)];
            w *= qWeight[t];
            std::uint64_t q = qs[t], p = qPrime[t];
            int e = 0;
            while (q > 1) { q /= p; ++e; }
            expSum[p] += e;
        }
        double ev = 1.0;
        for (auto [p, e] : expSum) {
            if (e & 1) { ev = 0.0; break; }
            ev *= double(p) / double(p + 1);
        }
        total += w * ev;
        // odometer over ordered tuples
        int pos = k - 1;
        while (pos >= 0) {
            if (++idx[static_cast<size_t>(pos)] < Q) break;
            idx[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return total;
}

// Evaluate sum over n <= nmax, n composed only of primes <= 50, of
// Lambda(n) x_n / n^s for a fixed assignment x_p; x_n = prod x_p^(e_p).
inline double smooth_series(const std::map<std::uint64_t, int>& xp,
                            std::uint64_t nmax, double s) {
    double total = 0.0;
    for (std::uint64_t n = 2; n <= nmax; ++n) {
        // Lambda(n) support only: n = p^e
        std::uint64_t p = n;  // prime unless a divisor <= sqrt(n) exists
        for (std::uint64_t f = 2; f * f <= n; ++f)
            if (n % f == 0) { p = f; break; }
        std::uint64_t m = n;
        int e = 0;
        while (m % p == 0) { m /= p; ++e; }
        if (m != 1) continue;
        auto it = xp.find(p);
        if (it == xp.end()) continue;  // prime beyond the assignment: skip
        int x = it->second;
        int xn = x == 0 ? 0 : (e % 2 == 0 ? 1 : x);  // x^e for x in {-1,0,1}
        total += std::log(double(p)) * double(xn) * std::pow(double(n), -s);
    }
    return total;
}

} // namespace oracle
