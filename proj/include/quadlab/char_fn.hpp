#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "quadlab/errors.hpp"
#include "quadlab/format.hpp"
#include "quadlab/primes.hpp"
#include "quadlab/random_model.hpp"
#include "quadlab/summation.hpp"

namespace quadlab {

// One evaluation of the model's characteristic function. The value is also
// carried in log-polar form: |phi| underflows a double past tau ~ 200 (the
// true magnitude reaches e^-4600), but log|phi| and the accumulated argument
// stay finite, and the decay-rate checks need exactly those.
struct CharFnValue {
    double tau = 0.0;
    double re = 1.0, im = 0.0;
    double logAbs = 0.0;  // log |phi|
    double arg = 0.0;     // summed factor arguments (a continuous branch)
    double tailEstimate = 0.0;
};

// phi(tau) = prod_{p <= P} [ 1/(p+1)
//              + p/(2(p+1)) (exp(-i tau a_p) + exp(i tau b_p)) ],
// a_p = log p/(p^(1/2+eps) - 1), b_p = log p/(p^(1/2+eps) + 1).
// Construction precomputes (a_p, b_p, weights); eval is O(pi(P)) trig calls.
class CharFn {
public:
    CharFn(double epsilon, std::uint64_t P) : epsilon_(epsilon), P_(P) {
        if (!(epsilon > 0.0) || !(epsilon < 0.5))
            throw config_error("eps: must lie in (0, 1/2), got " + fmt_double(epsilon));
        if (P < 2) throw config_error("prime-cutoff: must be >= 2, got " +
                                      std::to_string(P));
        auto ps = primes_up_to(P);
        a_.reserve(ps.size());
        b_.reserve(ps.size());
        w1_.reserve(ps.size());
        double s = 0.5 + epsilon;
        for (std::uint64_t p : ps) {
            double lp = std::log(double(p));
            double ppow = std::pow(double(p), s);
            a_.push_back(lp / (ppow - 1.0));
            b_.push_back(lp / (ppow + 1.0));
            w1_.push_back(double(p) / (2.0 * double(p + 1)));
        }
        tailCoeff_ = log_weight_tail(double(P), epsilon);
    }

    double epsilon() const { return epsilon_; }
    std::uint64_t prime_cutoff() const { return P_; }

    // Per-prime factor, written so that tau = 0 gives exactly (1, 0):
    // re = 1 - w1 (2 sin^2(tau a/2) + 2 sin^2(tau b/2)) uses w0 + 2 w1 = 1
    // instead of summing three nearly-cancelling cosine terms.
    static void factor(double tau, double a, double b, double w1, double& re,
                       double& im) {
        double sa = std::sin(0.5 * tau * a);
        double sb = std::sin(0.5 * tau * b);
        re = 1.0 - 2.0 * w1 * (sa * sa + sb * sb);
        im = w1 * (std::sin(tau * b) - std::sin(tau * a));
    }

    CharFnValue eval(double tau) const {
        CharFnValue v;
        v.tau = tau;
        NeumaierSum logAbs, arg;
        for (size_t i = 0; i < a_.size(); ++i) {
            double re, im;
            factor(tau, a_[i], b_[i], w1_[i], re, im);
            logAbs.add(0.5 * std::log(re * re + im * im));
            arg.add(std::atan2(im, re));
        }
        v.logAbs = logAbs.value();
        v.arg = arg.value();
        v.re = std::exp(v.logAbs) * std::cos(v.arg);
        v.im = std::exp(v.logAbs) * std::sin(v.arg);
        v.tailEstimate = tau * tau * tailCoeff_;
        return v;
    }

private:
    double epsilon_;
    std::uint64_t P_;
    std::vector<double> a_, b_, w1_;
    double tailCoeff_ = 0.0;
};

inline CharFnValue char_fn(double tau, double epsilon, std::uint64_t P) {
    return CharFn(epsilon, P).eval(tau);
}

inline std::vector<CharFnValue> char_fn_curve(double epsilon, std::uint64_t P,
                                              const std::vector<double>& taus) {
    CharFn phi(epsilon, P);
    std::vector<CharFnValue> out;
    out.reserve(taus.size());
    for (double t : taus) out.push_back(phi.eval(t));
    return out;
}

inline std::string charfn_to_csv(const std::vector<CharFnValue>& curve) {
    std::string out = "tau,re,im,tailEstimate\n";
    for (const auto& v : curve)
        out += fmt_double(v.tau) + "," + fmt_double(v.re) + "," + fmt_double(v.im) +
               "," + fmt_double(v.tailEstimate) + "\n";
    return out;
}

} // namespace quadlab
