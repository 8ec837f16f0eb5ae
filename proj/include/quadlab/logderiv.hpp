#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quadlab/errors.hpp"
#include "quadlab/format.hpp"
#include "quadlab/kronecker.hpp"
#include "quadlab/parallel.hpp"
#include "quadlab/philox.hpp"
#include "quadlab/primes.hpp"
#include "quadlab/summation.hpp"
#include "quadlab/von_mangoldt.hpp"

namespace quadlab {

// Truncation cutoffs live in Z + 1/2 so "n <= lambda" never lands on an
// integer boundary. Policy: lambda = round(N^0.6) + 1/2, capped below 10^7.
inline double lambda_policy(std::int64_t N) {
    if (N < 1) throw config_error("N: must be >= 1, got " + std::to_string(N));
    double lam = std::floor(std::pow(static_cast<double>(N), 0.6) + 0.5) + 0.5;
    return std::min(lam, 1e7 - 0.5);
}

// The audit doubles the cutoff; keeping both in Z + 1/2 keeps both sums
// boundary-free. For half-integer lambda this is 2*lambda + 1/2.
inline double audit_lambda(double lambda) {
    return std::floor(2.0 * lambda) + 0.5;
}

// Scale for the truncation self-consistency gap |value(lambda) - value(2lambda)|.
// Heuristic: treat chi_D(n) as random signs, so the tail sum over
// (lambda, 2lambda] has variance ~ integral of log(t) * t^(-1-2eps) dt over
// that window (log t stands in for the Lambda weight density). The tolerance
// is six of those standard deviations: generous enough that honest truncation
// error never trips it, tight enough that a corrupted evaluation does.
inline double default_consistency_tol(double lambda, double epsilon) {
    auto G = [epsilon](double x) {
        return std::pow(x, -2.0 * epsilon) *
               (std::log(x) / (2.0 * epsilon) + 1.0 / (4.0 * epsilon * epsilon));
    };
    double variance = G(lambda) - G(2.0 * lambda);
    return 6.0 * std::sqrt(std::max(variance, 0.0));
}

// Large-value cut for the exceptional-set proxy. The shape
// (log N / log log N)^(1/2 - eps) is the scale at which the measure of the
// exceedance set decays like a power of N; at the bare scale roughly half the
// family still sits above it (the distribution's bulk extends past 1), so a
// calibration factor of 5 moves the cut into the genuine tail. Measured on the
// model at eps = 0.25: exceedance ~0.52 at factor 1, ~4e-4 at factor 5.
inline double large_value_threshold(std::int64_t N, double epsilon) {
    if (N < 3) throw config_error("N: threshold needs N >= 3, got " + std::to_string(N));
    double ratio = std::log(static_cast<double>(N)) /
                   std::log(std::log(static_cast<double>(N)));
    return 5.0 * std::pow(ratio, 0.5 - epsilon);
}

struct TruncationParams {
    double epsilon = 0.25;
    double lambda = 0.0;         // required; Z + 1/2
    double consistencyTol = 0.0; // <= 0 means: fill from default_consistency_tol
    double auditFraction = 0.01; // share of discriminants that get the doubled-cutoff check

    TruncationParams resolved() const {
        TruncationParams p = *this;
        if (!(p.epsilon > 0.0) || !(p.epsilon < 0.5))
            throw config_error("eps: must lie in (0, 1/2), got " + fmt_double(p.epsilon));
        if (!(p.lambda >= 0.5))
            throw config_error("lambda: must be >= 0.5, got " + fmt_double(p.lambda));
        if (p.lambda - std::floor(p.lambda) != 0.5)
            throw config_error("lambda: must be of the form integer + 1/2, got " +
                               fmt_double(p.lambda));
        if (p.consistencyTol <= 0.0)
            p.consistencyTol = default_consistency_tol(p.lambda, p.epsilon);
        if (!(p.auditFraction >= 0.0) || !(p.auditFraction <= 1.0))
            throw config_error("audit-fraction: must lie in [0, 1], got " +
                               fmt_double(p.auditFraction));
        return p;
    }
};

// Membership in the audit subsample is a pure function of D, independent of N,
// family order, and thread count. So audits at different N nest, and a resumed
// sweep audits exactly the discriminants a fresh one would.
inline bool audit_selected(std::int64_t D, double auditFraction) {
    if (auditFraction <= 0.0) return false;
    if (auditFraction >= 1.0) return true;
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(D)) >> 32;
    return h < static_cast<std::uint64_t>(auditFraction * 4294967296.0);
}

struct LogDerivValue {
    std::int64_t discriminant = 0;
    double value = 0.0;
    double lambdaUsed = 0.0;
    double consistencyGap = 0.0;  // 0 unless audited or a large-value candidate
    bool flagged = false;
};

// Direct evaluator for (L'/L(1/2+eps, chi_D))^k by the truncated Dirichlet
// polynomial (-1)^k sum_{n <= lambda} Lambda_k(n) chi_D(n) n^(-1/2-eps).
// k = 1 walks the prime-power support; k >= 2 expands chi_D densely from a
// smallest-prime-factor table and reads Lambda_k from the convolution table.
// Tables extend to the audit cutoff so consistency_gap needs no rebuild.
// This is the reference path: the family sweep below has its own k = 1 kernel.
class PowEvaluator {
public:
    PowEvaluator(int k, const TruncationParams& params)
        : k_(k), params_(params.resolved()) {
        if (k < 1 || k > 8)
            throw config_error("k: supported range is 1..8, got " + std::to_string(k));
        std::uint64_t limit =
            static_cast<std::uint64_t>(std::floor(audit_lambda(params_.lambda)));
        if (k_ == 1) {
            qs_ = prime_powers_up_to(limit);
        } else {
            if (limit > 20000000ULL)
                throw resource_error("PowEvaluator: dense tables for k >= 2 are "
                                     "capped at lambda <= 10^7, got " +
                                     fmt_double(params_.lambda));
            table_.emplace(limit, k_);
            spf_ = spf_table(limit);
        }
    }

    const TruncationParams& params() const { return params_; }

    double evaluate(std::int64_t D) const { return evaluate_at(D, params_.lambda); }

    double consistency_gap(std::int64_t D) const {
        return std::abs(evaluate_at(D, params_.lambda) -
                        evaluate_at(D, audit_lambda(params_.lambda)));
    }

    double evaluate_at(std::int64_t D, double lambda) const {
        if (lambda > audit_lambda(params_.lambda))
            throw cutoff_error("lambda: exceeds evaluator tables, got " +
                               fmt_double(lambda));
        double s = 0.5 + params_.epsilon;
        std::uint64_t bound = static_cast<std::uint64_t>(std::floor(lambda));
        NeumaierSum acc;
        if (k_ == 1) {
            std::uint32_t lastP = 0;
            int lastE = 0;
            for (const auto& pp : qs_) {
                if (pp.q > bound) break;
                if (pp.p != lastP) {
                    lastP = pp.p;
                    lastE = kronecker(D, pp.p);
                }
                if (lastE == 0) continue;
                // chi_D(p^j) = chi_D(p)^j: lastE for odd j, 1 for even j.
                double chi = (pp.q == static_cast<std::uint64_t>(pp.p) ||
                              is_odd_power(pp))
                                 ? lastE
                                 : 1.0;
                acc.add(pp.logp * chi * std::pow(static_cast<double>(pp.q), -s));
            }
            return -acc.value();
        }
        if (bound >= spf_.size())
            throw cutoff_error("lambda: exceeds evaluator tables, got " + fmt_double(lambda));
        // chi_D over 1..bound, one multiply per value.
        std::vector<signed char> chi(static_cast<size_t>(bound) + 1, 0);
        chi[1] = 1;
        for (std::uint64_t n = 2; n <= bound; ++n) {
            std::uint32_t p = spf_[static_cast<size_t>(n)];
            signed char cp = chiP(D, p);
            chi[static_cast<size_t>(n)] =
                static_cast<signed char>(cp * chi[static_cast<size_t>(n / p)]);
        }
        const auto& row = table_->row(k_);
        for (std::uint64_t n = 2; n <= bound; ++n) {
            double w = row[static_cast<size_t>(n)];
            if (w == 0.0 || chi[static_cast<size_t>(n)] == 0) continue;
            acc.add(w * chi[static_cast<size_t>(n)] *
                    std::pow(static_cast<double>(n), -s));
        }
        return (k_ % 2 == 0) ? acc.value() : -acc.value();
    }

private:
    static bool is_odd_power(const PrimePower& pp) {
        // j from q = p^j by repeated division; powers are tiny (j <= 35).
        std::uint64_t q = pp.q;
        int j = 0;
        while (q > 1) { q /= pp.p; ++j; }
        return (j & 1) != 0;
    }
    static signed char chiP(std::int64_t D, std::uint32_t p) {
        return static_cast<signed char>(kronecker(D, p));
    }

    int k_;
    TruncationParams params_;
    std::vector<PrimePower> qs_;        // k = 1
    std::optional<LambdaTable> table_;  // k >= 2
    std::vector<std::uint32_t> spf_;    // k >= 2
};

inline double truncated_logderiv_pow(std::int64_t D, int k,
                                     const TruncationParams& params) {
    return PowEvaluator(k, params).evaluate(D);
}

using ProgressFn = std::function<void(std::int64_t done, std::int64_t total)>;

struct FamilyEvaluation {
    std::int64_t N = 0;
    TruncationParams params;  // resolved
    double largeValueThreshold = 0.0;
    std::vector<LogDerivValue> values;  // family order
    std::int64_t flaggedCount = 0;
};

namespace logderiv_detail {

// Per-prime truncation coefficients for the k = 1 sweep kernel. With
// A_p = sum over odd j (p^j <= cutoff) of log(p) p^(-js) and B_p the even-j
// analogue, the contribution of p to -L'/L is A+B when chi_D(p) = +1, B-A when
// -1, and 0 when p | D. One kronecker call and one add per (D, p) pair.
struct PrimeCoeffs {
    std::vector<std::uint32_t> ps;  // primes <= audit cutoff, ascending
    std::vector<double> mainA, mainB;    // powers <= lambda (0 for p > lambda)
    std::vector<double> auditA, auditB;  // powers <= audit_lambda
    size_t mainCount = 0;                // primes <= lambda
};

inline PrimeCoeffs build_coeffs(const TruncationParams& params) {
    PrimeCoeffs c;
    double lam = params.lambda;
    double lam2 = audit_lambda(lam);
    double s = 0.5 + params.epsilon;
    std::uint64_t bound2 = static_cast<std::uint64_t>(std::floor(lam2));
    c.ps = primes_up_to(bound2);
    size_t n = c.ps.size();
    c.mainA.assign(n, 0.0);
    c.mainB.assign(n, 0.0);
    c.auditA.assign(n, 0.0);
    c.auditB.assign(n, 0.0);
    c.mainCount = 0;
    for (size_t i = 0; i < n; ++i) {
        std::uint64_t p = c.ps[i];
        if (static_cast<double>(p) < lam) c.mainCount = i + 1;
        double lp = std::log(static_cast<double>(p));
        std::uint64_t q = p;
        int j = 1;
        while (true) {
            double t = lp * std::pow(static_cast<double>(q), -s);
            if (j & 1) {
                c.auditA[i] += t;
                if (static_cast<double>(q) < lam) c.mainA[i] += t;
            } else {
                c.auditB[i] += t;
                if (static_cast<double>(q) < lam) c.mainB[i] += t;
            }
            if (q > bound2 / p) break;
            q *= p;
            ++j;
        }
    }
    return c;
}

inline double signed_sum(std::int64_t D, const PrimeCoeffs& c,
                         const std::vector<double>& A,
                         const std::vector<double>& B, size_t count) {
    NeumaierSum acc;
    for (size_t i = 0; i < count; ++i) {
        int e = kronecker(D, c.ps[i]);
        if (e == 0) continue;
        acc.add(e > 0 ? A[i] + B[i] : B[i] - A[i]);
    }
    return -acc.value();
}

inline LogDerivValue evaluate_one(std::int64_t D, const PrimeCoeffs& c,
                                  const TruncationParams& params,
                                  double threshold) {
    LogDerivValue v;
    v.discriminant = D;
    v.lambdaUsed = params.lambda;
    v.value = signed_sum(D, c, c.mainA, c.mainB, c.mainCount);
    bool large = std::abs(v.value) >= threshold;
    if (large || audit_selected(D, params.auditFraction)) {
        double v2 = signed_sum(D, c, c.auditA, c.auditB, c.ps.size());
        v.consistencyGap = std::abs(v.value - v2);
    }
    v.flagged = large || v.consistencyGap > params.consistencyTol;
    return v;
}

inline std::string cache_header(std::int64_t N, const TruncationParams& params) {
    return "N=" + std::to_string(N) + " eps=" + fmt_double(params.epsilon) +
           " lambda=" + fmt_double(params.lambda) + " version=1";
}

inline std::string cache_row(const LogDerivValue& v) {
    return std::to_string(v.discriminant) + " " + fmt_double(v.value) + " " +
           fmt_double(v.consistencyGap) + " " + (v.flagged ? "1" : "0");
}

// Reads a (possibly truncated) cache and returns how many leading family
// entries it covers. A partial trailing line (no newline: the process died
// mid-write) is dropped. Any D out of family order is a corrupt cache and
// throws rather than silently recomputing.
inline size_t load_cache_prefix(const std::string& path, std::int64_t N,
                                const TruncationParams& params,
                                const std::vector<std::int64_t>& family,
                                std::vector<LogDerivValue>& out) {
    if (path.empty() || !file_exists(path)) return 0;
    std::string text = read_text_file(path);
    size_t pos = text.find('\n');
    if (pos == std::string::npos) return 0;  // header never finished
    std::string header = text.substr(0, pos);
    std::string expect = cache_header(N, params);
    if (header != expect)
        throw config_error("cache: header mismatch in " + path + ": have '" +
                           header + "', expected '" + expect + "'");
    size_t count = 0;
    size_t lineStart = pos + 1;
    while (lineStart < text.size() && count < family.size()) {
        size_t lineEnd = text.find('\n', lineStart);
        if (lineEnd == std::string::npos) break;  // partial row, recompute it
        std::string line = text.substr(lineStart, lineEnd - lineStart);
        lineStart = lineEnd + 1;
        if (line.empty()) continue;
        LogDerivValue v;
        char flag = '0';
        char valueBuf[40], gapBuf[40];
        long long d = 0;
        if (std::sscanf(line.c_str(), "%lld %39s %39s %c", &d, valueBuf, gapBuf,
                        &flag) != 4)
            throw config_error("cache: bad row '" + line + "' in " + path);
        v.discriminant = d;
        v.value = parse_double(valueBuf, "cache value");
        v.consistencyGap = parse_double(gapBuf, "cache gap");
        v.flagged = flag == '1';
        v.lambdaUsed = params.lambda;
        if (v.discriminant != family[count])
            throw config_error("cache: row " + std::to_string(count) + " has D=" +
                               std::to_string(v.discriminant) + ", family has " +
                               std::to_string(family[count]) + " in " + path);
        out[count] = v;
        ++count;
    }
    return count;
}

} // namespace logderiv_detail

// Sweep L'/L(1/2+eps, chi_D) over a discriminant family. Results come back in
// family order regardless of thread count (each D is evaluated whole by one
// thread, and per-D summation order is fixed). When cachePath is nonempty the
// sweep appends completed rows in chunks and resumes from whatever prefix an
// interrupted run left behind.
inline FamilyEvaluation evaluate_family(const std::vector<std::int64_t>& family,
                                        std::int64_t N,
                                        const TruncationParams& paramsIn,
                                        int threads = 0,
                                        const std::string& cachePath = {},
                                        const ProgressFn& progress = {}) {
    FamilyEvaluation ev;
    ev.N = N;
    ev.params = paramsIn.resolved();
    ev.largeValueThreshold = large_value_threshold(N, ev.params.epsilon);
    ev.values.resize(family.size());

    auto coeffs = logderiv_detail::build_coeffs(ev.params);
    size_t done =
        logderiv_detail::load_cache_prefix(cachePath, N, ev.params, family, ev.values);

    std::ofstream cache;
    if (!cachePath.empty()) {
        bool fresh = done == 0;
        cache.open(cachePath, fresh ? (std::ios::binary | std::ios::trunc)
                                    : (std::ios::binary | std::ios::app));
        if (!cache) throw io_error("cannot open cache for writing: " + cachePath);
        if (fresh) cache << logderiv_detail::cache_header(N, ev.params) << "\n";
        else {
            // Drop any partial trailing line by rewriting the good prefix.
            // Cheaper than seek gymnastics and still one pass.
            cache.close();
            std::string body = logderiv_detail::cache_header(N, ev.params) + "\n";
            for (size_t i = 0; i < done; ++i)
                body += logderiv_detail::cache_row(ev.values[i]) + "\n";
            write_text_file(cachePath, body);
            cache.open(cachePath, std::ios::binary | std::ios::app);
            if (!cache) throw io_error("cannot reopen cache: " + cachePath);
        }
    }

    const size_t kChunk = 4096;
    while (done < family.size()) {
        size_t hi = std::min(done + kChunk, family.size());
        parallel_for(static_cast<std::int64_t>(hi - done), threads,
                     [&](std::int64_t j) {
                         size_t idx = done + static_cast<size_t>(j);
                         ev.values[idx] = logderiv_detail::evaluate_one(
                             family[idx], coeffs, ev.params, ev.largeValueThreshold);
                     });
        if (cache.is_open()) {
            std::string block;
            for (size_t i = done; i < hi; ++i)
                block += logderiv_detail::cache_row(ev.values[i]) + "\n";
            cache << block;
            cache.flush();
            if (!cache) throw io_error("cache write failed: " + cachePath);
        }
        done = hi;
        if (progress) progress(static_cast<std::int64_t>(done),
                               static_cast<std::int64_t>(family.size()));
    }

    for (const auto& v : ev.values)
        if (v.flagged) ++ev.flaggedCount;
    return ev;
}

// CSV mirror of the sweep cache.
inline std::string sweep_to_csv(const FamilyEvaluation& ev) {
    std::string out = "D,value,consistencyGap,flagged\n";
    for (const auto& v : ev.values)
        out += std::to_string(v.discriminant) + "," + fmt_double(v.value) + "," +
               fmt_double(v.consistencyGap) + "," + (v.flagged ? "1" : "0") + "\n";
    return out;
}

// Mean of value^k over unflagged entries, divided by the FULL family size:
// flagged entries contribute zero to the numerator but stay in the
// denominator, matching the indicator-restricted averages the flags stand for.
inline double family_moment(const FamilyEvaluation& ev, int k) {
    if (k < 1) throw config_error("k: must be >= 1, got " + std::to_string(k));
    if (ev.values.empty()) throw config_error("family_moment: empty evaluation");
    NeumaierSum acc;
    for (const auto& v : ev.values) {
        if (v.flagged) continue;
        double t = 1.0;
        for (int i = 0; i < k; ++i) t *= v.value;
        acc.add(t);
    }
    return acc.value() / static_cast<double>(ev.values.size());
}

} // namespace quadlab
