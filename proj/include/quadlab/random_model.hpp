#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "quadlab/errors.hpp"
#include "quadlab/format.hpp"
#include "quadlab/parallel.hpp"
#include "quadlab/philox.hpp"
#include "quadlab/primes.hpp"
#include "quadlab/summation.hpp"
#include "quadlab/von_mangoldt.hpp"

namespace quadlab {

struct ModelConfig {
    double epsilon = 0.25;
    std::uint64_t primeCutoff = 100000;
    std::uint64_t seed = 42;

    ModelConfig validated() const {
        if (!(epsilon > 0.0) || !(epsilon < 0.5))
            throw config_error("eps: must lie in (0, 1/2), got " + fmt_double(epsilon));
        if (primeCutoff < 2)
            throw config_error("prime-cutoff: must be >= 2, got " +
                               std::to_string(primeCutoff));
        return *this;
    }
};

// P(X_p = -1), P(X_p = 0), P(X_p = +1) as exact rationals over den = 2(p+1):
// numerators p, 2, p. They sum to the denominator in integer arithmetic, which
// is the normalization statement with no rounding in it.
struct XpDistribution {
    std::uint64_t p = 0;
    std::uint64_t numMinus = 0, numZero = 0, numPlus = 0, den = 1;

    double prob_minus() const { return double(numMinus) / double(den); }
    double prob_zero() const { return double(numZero) / double(den); }
    double prob_plus() const { return double(numPlus) / double(den); }
    // E[X_p^e] for even e >= 2 (odd moments vanish by symmetry).
    double even_moment() const { return double(p) / double(p + 1); }
};

inline XpDistribution xp_distribution(std::uint64_t p) {
    if (!is_prime_u64(p))
        throw config_error("p: xp_distribution needs a prime, got " + std::to_string(p));
    return {p, p, 2, p, 2 * (p + 1)};
}

// E[X_n] = prod_{p|n} p/(p+1) when n is a perfect square, 0 otherwise
// (odd exponent anywhere kills the product by sign symmetry).
inline double expected_Xn(std::uint64_t n) {
    if (n == 0) throw config_error("n: must be >= 1");
    if (n == 1) return 1.0;
    double r = 1.0;
    for (auto [p, e] : factorize(n)) {
        if (e & 1) return 0.0;
        r *= double(p) / double(p + 1);
    }
    return r;
}

// Integral-comparison estimate of sum_{t > x} log(t) t^(-1-2eps) against the
// prime counting density, i.e. of sum_{p > x} (log p)^2 p^(-1-2eps). This is
// the second-moment size of everything the prime cutoff throws away; batches
// and characteristic-function values carry it so the truncation is never
// silent.
inline double log_weight_tail(double x, double epsilon) {
    return std::pow(x, -2.0 * epsilon) *
           (std::log(x) / (2.0 * epsilon) + 1.0 / (4.0 * epsilon * epsilon));
}

namespace model_detail {

// Inverse-CDF thresholds on a full 64-bit uniform, computed exactly in 128-bit
// integer arithmetic: u < t1 -> -1, u < t2 -> 0, else +1. No rejection loop.
struct XpSampler {
    std::uint64_t t1, t2;
    static XpSampler make(std::uint64_t p) {
        __uint128_t den = 2 * (p + 1);
        XpSampler s;
        s.t1 = static_cast<std::uint64_t>((static_cast<__uint128_t>(p) << 64) / den);
        s.t2 = static_cast<std::uint64_t>((static_cast<__uint128_t>(p + 2) << 64) / den);
        return s;
    }
    int draw(std::uint64_t u) const { return u < t1 ? -1 : (u < t2 ? 0 : 1); }
};

// Uniform for (sample i, prime ordinal j): one Philox block covers ordinals
// 2m and 2m+1, so consecutive primes share a call but nothing depends on
// evaluation order.
inline std::uint64_t uniform_for(std::uint64_t seed, std::uint64_t sampleIndex,
                                 std::uint64_t primeOrdinal) {
    auto block = philox2x64(sampleIndex, primeOrdinal >> 1, seed);
    return block[primeOrdinal & 1];
}

} // namespace model_detail

// Test hook: the value of X_p drawn for sample i at prime ordinal j. The
// sampling loop below consumes exactly these values, so statistics of the raw
// X_p stream can be checked against xp_distribution without rerunning sums.
inline int sample_xp(const ModelConfig& cfg, std::uint64_t sampleIndex,
                     std::uint64_t primeOrdinal, std::uint64_t p) {
    auto s = model_detail::XpSampler::make(p);
    return s.draw(model_detail::uniform_for(cfg.seed, sampleIndex, primeOrdinal));
}

struct ModelSampleBatch {
    ModelConfig config;
    std::vector<double> samples;
    double tailEstimate = 0.0;
};

// Draw `count` independent samples of sum_{p <= P} log(p) x_p/(p^(1/2+eps) - x_p).
// Sample i is a pure function of (seed, i): parallel schedules and restarts
// produce identical batches. Per prime the two possible nonzero contributions
// are precomputed; drawing is a threshold compare and a table read.
inline ModelSampleBatch sample_L(const ModelConfig& cfgIn, std::uint64_t count,
                                 int threads = 0) {
    ModelConfig cfg = cfgIn.validated();
    if (count < 1) throw config_error("samples: must be >= 1");
    auto ps = primes_up_to(cfg.primeCutoff);
    size_t np = ps.size();
    double s = 0.5 + cfg.epsilon;

    std::vector<model_detail::XpSampler> samplers(np);
    std::vector<double> plusVal(np), minusVal(np);
    for (size_t j = 0; j < np; ++j) {
        std::uint64_t p = ps[j];
        samplers[j] = model_detail::XpSampler::make(p);
        double lp = std::log(double(p));
        double ppow = std::pow(double(p), s);
        plusVal[j] = lp / (ppow - 1.0);
        minusVal[j] = -lp / (ppow + 1.0);
    }

    ModelSampleBatch batch;
    batch.config = cfg;
    batch.tailEstimate = log_weight_tail(double(cfg.primeCutoff), cfg.epsilon);
    batch.samples.assign(count, 0.0);
    parallel_for(static_cast<std::int64_t>(count), threads, [&](std::int64_t i) {
        NeumaierSum acc;
        std::uint64_t ctr0 = static_cast<std::uint64_t>(i);
        std::array<std::uint64_t, 2> block{};
        for (size_t j = 0; j < np; ++j) {
            if ((j & 1) == 0) block = philox2x64(ctr0, j >> 1, cfg.seed);
            int x = samplers[j].draw(block[j & 1]);
            if (x > 0) acc.add(plusVal[j]);
            else if (x < 0) acc.add(minusVal[j]);
        }
        batch.samples[static_cast<size_t>(i)] = acc.value();
    });
    return batch;
}

// E[L] for the truncated Euler form: averaging X_p/(p^s - X_p) over the three
// outcomes gives (p/(p+1)) / (p^(1+2eps) - 1) per prime.
inline double exact_first_moment(double epsilon, std::uint64_t P) {
    if (!(epsilon > 0.0) || !(epsilon < 0.5))
        throw config_error("eps: must lie in (0, 1/2), got " + fmt_double(epsilon));
    auto ps = primes_up_to(P);
    NeumaierSum acc;
    for (std::uint64_t p : ps) {
        double lp = std::log(double(p));
        acc.add(lp * (double(p) / double(p + 1)) /
                (std::pow(double(p), 1.0 + 2.0 * epsilon) - 1.0));
    }
    return acc.value();
}

namespace model_detail {

// Ordered-tuple sums over the powers of one prime, split by exponent-sum
// parity: u[j][par] = sum over ordered j-tuples (m_1..m_j), p^(m_i) <= lambda,
// of prod log(p) p^(-m_i s), restricted to sum m_i = par mod 2. The prime's
// block weight for j occupied slots is then (p/(p+1)) u[j][even].
inline void prime_block_weights(std::uint64_t p, double lambda, double s, int k,
                                std::vector<double>& vOut) {
    double lp = std::log(double(p));
    std::vector<double> wOdd, wEven;  // per-power weights by parity of m
    std::uint64_t q = p;
    int m = 1;
    while (double(q) <= lambda) {  // per-position cutoff n <= lambda, inclusive
        double t = lp * std::pow(double(q), -s);
        if (m & 1) wOdd.push_back(t);
        else wEven.push_back(t);
        if (q > static_cast<std::uint64_t>(lambda) / p) break;
        q *= p;
        ++m;
    }
    double sumOdd = 0.0, sumEven = 0.0;
    for (double t : wOdd) sumOdd += t;
    for (double t : wEven) sumEven += t;

    // u-recursion over tuple length; only parity of the running exponent sum
    // matters, so two accumulators suffice.
    std::vector<double> uE(static_cast<size_t>(k) + 1, 0.0), uO = uE;
    uE[0] = 1.0;
    for (int j = 1; j <= k; ++j) {
        uE[j] = uE[j - 1] * sumEven + uO[j - 1] * sumOdd;
        uO[j] = uO[j - 1] * sumEven + uE[j - 1] * sumOdd;
    }
    vOut.assign(static_cast<size_t>(k) + 1, 0.0);
    double even = double(p) / double(p + 1);
    for (int j = 1; j <= k; ++j) vOut[j] = even * uE[j];
}

} // namespace model_detail

// E[(sum_{n <= lambda} Lambda(n) X_n n^(-1/2-eps))^k], exactly (up to rounding):
// expand over ordered k-tuples of prime powers, kill every term with an odd
// exponent sum at any prime, and weight surviving primes by p/(p+1). The
// enumeration is organized as an exponential-generating-function product over
// primes, so cost is ~ pi(lambda) * k^2 instead of (prime powers)^k.
// k = 1 collapses to a sum over squares of prime powers q <= sqrt(lambda),
// which extends the feasible range to lambda ~ 1e16 for first-moment checks.
inline double exact_moment(int k, double epsilon, double lambda) {
    if (k < 1 || k > 8)
        throw resource_error("k: exact_moment supports 1..8, got " + std::to_string(k));
    if (!(epsilon > 0.0) || !(epsilon < 0.5))
        throw config_error("eps: must lie in (0, 1/2), got " + fmt_double(epsilon));
    if (!(lambda >= 2.0))
        throw config_error("lambda: must be >= 2, got " + fmt_double(lambda));
    double s = 0.5 + epsilon;
    if (k == 1) {
        if (lambda > 1e16)
            throw resource_error("lambda: exact_moment k=1 is capped at 1e16, got " +
                                 fmt_double(lambda));
        // Surviving n are p^(2j); enumerate q = p^j <= sqrt(lambda).
        std::uint64_t qmax =
            static_cast<std::uint64_t>(std::floor(std::sqrt(lambda)));
        while (double(qmax + 1) * double(qmax + 1) <= lambda) ++qmax;  // sqrt slop
        while (qmax >= 1 && double(qmax) * double(qmax) > lambda) --qmax;
        NeumaierSum acc;
        for (const auto& pp : prime_powers_up_to(qmax)) {
            double even = double(pp.p) / double(pp.p + 1);
            acc.add(pp.logp * even * std::pow(double(pp.q), -2.0 * s));
        }
        return acc.value();
    }
    if (lambda > 1e7 + 1)
        throw resource_error("lambda: exact_moment k>=2 is capped at 1e7, got " +
                             fmt_double(lambda));
    auto ps = primes_up_to(static_cast<std::uint64_t>(std::floor(lambda)));
    std::vector<double> fact(static_cast<size_t>(k) + 1, 1.0);
    for (int j = 1; j <= k; ++j) fact[j] = fact[j - 1] * j;

    // g[t] = t-th EGF coefficient of the product over primes processed so far.
    std::vector<double> g(static_cast<size_t>(k) + 1, 0.0), v;
    g[0] = 1.0;
    for (std::uint64_t p : ps) {
        model_detail::prime_block_weights(p, lambda, s, k, v);
        for (int t = k; t >= 1; --t) {
            double add = 0.0;
            for (int j = 1; j <= t; ++j) add += g[t - j] * v[j] / fact[j];
            g[t] += add;
        }
    }
    return fact[k] * g[k];
}

// The truncation the k-th moment ignores, in the envelope
// (2 log lambda)^k / lambda^(1+2eps). Reported next to exact_moment values.
inline double exact_moment_tail_bound(int k, double epsilon, double lambda) {
    return std::pow(2.0 * std::log(lambda), k) /
           std::pow(lambda, 1.0 + 2.0 * epsilon);
}

struct MomentEstimate {
    double value = 0.0;
    double stderrValue = 0.0;
};

// Sample mean of value^k (or |value|^k) with jackknife standard error; for a
// plain mean the jackknife collapses to sqrt(sum (x - xbar)^2 / (n(n-1))),
// which is what gets computed, in a fixed order.
inline MomentEstimate mc_moment(const ModelSampleBatch& batch, int k,
                                bool absolute = false) {
    if (batch.samples.empty()) throw config_error("batch: empty sample batch");
    if (k < 1) throw config_error("k: must be >= 1, got " + std::to_string(k));
    size_t n = batch.samples.size();
    std::vector<double> xs(n);
    for (size_t i = 0; i < n; ++i) {
        double v = absolute ? std::abs(batch.samples[i]) : batch.samples[i];
        double t = 1.0;
        for (int j = 0; j < k; ++j) t *= v;
        xs[i] = t;
    }
    MomentEstimate est;
    est.value = pairwise_sum(xs) / double(n);
    if (n > 1) {
        NeumaierSum dev;
        for (size_t i = 0; i < n; ++i) {
            double d = xs[i] - est.value;
            dev.add(d * d);
        }
        est.stderrValue = std::sqrt(dev.value() / (double(n) * double(n - 1)));
    }
    return est;
}

// --- batch serialization -----------------------------------------------------
// Binary layout: "QLSAMP01" magic, then epsilon (f64), primeCutoff (u64),
// seed (u64), count (u64), then count little-endian f64 samples. tailEstimate
// is recomputed on load from (epsilon, primeCutoff); it is derived state.

namespace model_detail {

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}
inline void put_f64(std::string& out, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    put_u64(out, v);
}
inline std::uint64_t get_u64(const std::string& in, size_t off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= std::uint64_t(static_cast<unsigned char>(in[off + i])) << (8 * i);
    return v;
}
inline double get_f64(const std::string& in, size_t off) {
    std::uint64_t v = get_u64(in, off);
    double x;
    std::memcpy(&x, &v, 8);
    return x;
}

} // namespace model_detail

inline void save_batch(const std::string& path, const ModelSampleBatch& batch) {
    std::string out = "QLSAMP01";
    model_detail::put_f64(out, batch.config.epsilon);
    model_detail::put_u64(out, batch.config.primeCutoff);
    model_detail::put_u64(out, batch.config.seed);
    model_detail::put_u64(out, batch.samples.size());
    for (double x : batch.samples) model_detail::put_f64(out, x);
    write_text_file(path, out);
}

inline ModelSampleBatch load_batch(const std::string& path) {
    std::string in = read_text_file(path);
    if (in.size() < 40 || in.compare(0, 8, "QLSAMP01") != 0)
        throw io_error("batch file: bad magic or truncated header in " + path);
    ModelSampleBatch batch;
    batch.config.epsilon = model_detail::get_f64(in, 8);
    batch.config.primeCutoff = model_detail::get_u64(in, 16);
    batch.config.seed = model_detail::get_u64(in, 24);
    std::uint64_t count = model_detail::get_u64(in, 32);
    if (in.size() != 40 + 8 * count)
        throw io_error("batch file: size " + std::to_string(in.size()) +
                       " does not match count " + std::to_string(count) + " in " + path);
    batch.samples.resize(count);
    for (std::uint64_t i = 0; i < count; ++i)
        batch.samples[i] = model_detail::get_f64(in, 40 + 8 * i);
    batch.config.validated();
    batch.tailEstimate = log_weight_tail(double(batch.config.primeCutoff),
                                         batch.config.epsilon);
    return batch;
}

inline std::string batch_to_csv(const ModelSampleBatch& batch) {
    std::string out = "value\n";
    for (double x : batch.samples) out += fmt_double(x) + "\n";
    return out;
}

} // namespace quadlab
