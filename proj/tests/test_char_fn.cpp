#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "quadlab/char_fn.hpp"

using namespace quadlab;

TEST(CharFn, TauZeroIsExactlyOne) {
    auto v = char_fn(0.0, 0.25, 10000);
    EXPECT_EQ(v.re, 1.0);
    EXPECT_EQ(v.im, 0.0);
    EXPECT_EQ(v.logAbs, 0.0);
    EXPECT_EQ(v.arg, 0.0);
    EXPECT_EQ(v.tailEstimate, 0.0);
}

TEST(CharFn, ConjugateSymmetry) {
    CharFn phi(0.25, 5000);
    for (double tau : {0.5, 1.0, 5.0}) {
        auto plus = phi.eval(tau);
        auto minus = phi.eval(-tau);
        EXPECT_NEAR(plus.re, minus.re, 1e-14) << tau;
        EXPECT_NEAR(plus.im, -minus.im, 1e-14) << tau;
        EXPECT_NEAR(plus.logAbs, minus.logAbs, 1e-12) << tau;
        EXPECT_NEAR(plus.arg, -minus.arg, 1e-12) << tau;
    }
}

TEST(CharFn, SinglePrimeFactorMatchesDirectExpectation) {
    // P = 2: phi is the single factor
    // 1/3 + (1/3) exp(-i tau a) + (1/3) exp(i tau b),
    // a = log2/(2^0.75 - 1), b = log2/(2^0.75 + 1). Written out by hand.
    double a = std::log(2.0) / (std::pow(2.0, 0.75) - 1.0);
    double b = std::log(2.0) / (std::pow(2.0, 0.75) + 1.0);
    for (double tau : {0.3, 1.7, 4.0}) {
        auto v = char_fn(tau, 0.25, 2);
        double re = 1.0 / 3.0 +
                    (1.0 / 3.0) * (std::cos(tau * a) + std::cos(tau * b));
        double im = (1.0 / 3.0) * (std::sin(tau * b) - std::sin(tau * a));
        EXPECT_NEAR(v.re, re, 1e-14) << tau;
        EXPECT_NEAR(v.im, im, 1e-14) << tau;
    }
}

TEST(CharFn, EveryFactorHasModulusAtMostOne) {
    CharFn phi(0.25, 2);  // factor() is static; P irrelevant here
    auto ps = primes_up_to(1000);
    double s = 0.75;
    for (double tau : {0.1, 1.0, 7.3, 55.0, 200.0}) {
        for (std::uint64_t p : ps) {
            double lp = std::log(double(p));
            double ppow = std::pow(double(p), s);
            double re, im;
            CharFn::factor(tau, lp / (ppow - 1.0), lp / (ppow + 1.0),
                           double(p) / (2.0 * double(p + 1)), re, im);
            ASSERT_LE(re * re + im * im, 1.0 + 1e-15) << "p=" << p << " tau=" << tau;
        }
    }
}

TEST(CharFn, ModulusIsNonincreasingAlongPrimes) {
    // Appending factors can only shrink |phi|, so logAbs decreases in P.
    double tau = 3.0;
    double prev = char_fn(tau, 0.25, 10).logAbs;
    for (std::uint64_t P : {100ull, 1000ull, 10000ull}) {
        double cur = char_fn(tau, 0.25, P).logAbs;
        EXPECT_LE(cur, prev + 1e-12);
        prev = cur;
    }
}

TEST(CharFn, DecaySlopeNearFourThirds) {
    // log(-log|phi|) against log tau over tau in [10, 200]: least squares
    // slope within 0.15 of 1/(1/2 + eps) = 2/(3/2) ... = 4/3 at eps = 1/4.
    CharFn phi(0.25, 100000);
    std::vector<double> xs, ys;
    for (double tau = 10.0; tau <= 200.0; tau *= 1.2) {
        auto v = phi.eval(tau);
        ASSERT_TRUE(std::isfinite(v.logAbs));
        ASSERT_LT(v.logAbs, 0.0);
        xs.push_back(std::log(tau));
        ys.push_back(std::log(-v.logAbs));
    }
    double n = double(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_NEAR(slope, 4.0 / 3.0, 0.15);
}

TEST(CharFn, LogPolarFormSurvivesUnderflow) {
    // Past tau ~ 200 the magnitude is below double range; the log-polar
    // fields must stay finite while re/im collapse to zero.
    auto v = char_fn(2000.0, 0.25, 100000);
    EXPECT_TRUE(std::isfinite(v.logAbs));
    EXPECT_LT(v.logAbs, -5000.0);
    EXPECT_TRUE(std::isfinite(v.arg));
    EXPECT_EQ(v.re, 0.0);
    EXPECT_EQ(v.im, 0.0);
}

TEST(CharFn, TailEstimateIsQuadraticInTau) {
    CharFn phi(0.25, 1000);
    auto v1 = phi.eval(3.0);
    auto v2 = phi.eval(6.0);
    EXPECT_DOUBLE_EQ(v1.tailEstimate, 9.0 * log_weight_tail(1000.0, 0.25));
    EXPECT_DOUBLE_EQ(v2.tailEstimate, 4.0 * v1.tailEstimate);
}

TEST(CharFn, CurveAndCsvShape) {
    auto curve = char_fn_curve(0.25, 100, {0.0, 1.0, 2.0});
    ASSERT_EQ(curve.size(), 3u);
    EXPECT_EQ(curve[0].re, 1.0);
    std::string csv = charfn_to_csv(curve);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "tau,re,im,tailEstimate");
    size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    EXPECT_EQ(lines, 4u);
}

TEST(CharFn, Validation) {
    EXPECT_THROW(CharFn(0.0, 100), config_error);
    EXPECT_THROW(CharFn(0.5, 100), config_error);
    EXPECT_THROW(CharFn(0.25, 1), config_error);
}
