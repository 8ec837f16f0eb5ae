#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "quadlab/char_fn.hpp"
#include "quadlab/errors.hpp"
#include "quadlab/format.hpp"
#include "quadlab/logderiv.hpp"
#include "quadlab/random_model.hpp"
#include "quadlab/summation.hpp"

namespace quadlab {

enum class SampleSource { family, model };

// Empirical distribution with a possibly deficient CDF: `denominator` may
// exceed the stored sample count. Family sweeps use that to realize the
// indicator convention: flagged discriminants are dropped from the jump set
// but still counted underneath, so CDF(+inf) = unflagged/total < 1.
struct EmpiricalDistribution {
    std::vector<double> sorted;
    std::uint64_t denominator = 0;
    SampleSource sourceTag = SampleSource::model;

    double cdf(double z) const {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), z);
        return double(it - sorted.begin()) / double(denominator);
    }

    static EmpiricalDistribution from_samples(std::vector<double> xs,
                                              SampleSource tag) {
        if (xs.empty()) throw config_error("samples: empty sample list");
        std::sort(xs.begin(), xs.end());
        EmpiricalDistribution d;
        d.denominator = xs.size();
        d.sorted = std::move(xs);
        d.sourceTag = tag;
        return d;
    }

    static EmpiricalDistribution from_family(const FamilyEvaluation& ev) {
        if (ev.values.empty()) throw config_error("family: empty evaluation");
        EmpiricalDistribution d;
        d.sourceTag = SampleSource::family;
        d.denominator = ev.values.size();
        d.sorted.reserve(ev.values.size());
        for (const auto& v : ev.values)
            if (!v.flagged) d.sorted.push_back(v.value);
        std::sort(d.sorted.begin(), d.sorted.end());
        if (d.sorted.empty()) throw config_error("family: every value is flagged");
        return d;
    }

    // The one place the two sign conventions meet. Batches store the model sum
    // +sum log(p) X_p/(p^s - X_p); the arithmetic side computes the Dirichlet
    // polynomial for L'/L, whose mean is the negative of that. Comparing
    // distributions therefore reflects model samples through x -> -x here, and
    // nowhere else.
    static EmpiricalDistribution from_model(const ModelSampleBatch& batch) {
        if (batch.samples.empty()) throw config_error("batch: empty sample batch");
        std::vector<double> xs;
        xs.reserve(batch.samples.size());
        for (double x : batch.samples) xs.push_back(-x);
        auto d = from_samples(std::move(xs), SampleSource::model);
        return d;
    }
};

inline EmpiricalDistribution empirical_cdf(std::vector<double> samples,
                                           SampleSource tag) {
    return EmpiricalDistribution::from_samples(std::move(samples), tag);
}

// Exact two-sample sup |F_A - F_B| by a merge over the union of jump points.
// Ties are consumed on both sides before the gap is read, and the final
// plateau compares the (possibly deficient) totals.
inline double ks_distance(const EmpiricalDistribution& A,
                          const EmpiricalDistribution& B) {
    if (A.sorted.empty() || B.sorted.empty())
        throw config_error("ks_distance: empty distribution");
    size_t i = 0, j = 0;
    double ks = 0.0;
    while (i < A.sorted.size() || j < B.sorted.size()) {
        double z;
        if (i == A.sorted.size()) z = B.sorted[j];
        else if (j == B.sorted.size()) z = A.sorted[i];
        else z = std::min(A.sorted[i], B.sorted[j]);
        while (i < A.sorted.size() && A.sorted[i] == z) ++i;
        while (j < B.sorted.size() && B.sorted[j] == z) ++j;
        double gap = std::abs(double(i) / double(A.denominator) -
                              double(j) / double(B.denominator));
        ks = std::max(ks, gap);
    }
    double tail = std::abs(double(A.sorted.size()) / double(A.denominator) -
                           double(B.sorted.size()) / double(B.denominator));
    return std::max(ks, tail);
}

struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> values;
    double inversionCutoff = 0.0;  // the T actually used
};

struct DensityOptions {
    double simpsonTol = 1e-9;  // absolute, per adaptive leaf
    int maxDepth = 28;
    double phiFloor = 1e-12;   // required |phi(T)|
};

// Doubles T until |phi(T)| sinks below the floor. Powers of two keep every
// adaptive bisection node exactly representable, which keeps the phi memo hits
// and therefore the artifact bytes reproducible.
inline double choose_inversion_cutoff(const CharFn& phi, double floorAbs = 1e-12,
                                      double maxT = 4096.0) {
    for (double T = 8.0; T <= maxT; T *= 2.0) {
        if (std::exp(phi.eval(T).logAbs) < floorAbs) return T;
    }
    throw cutoff_error("charfn: |phi(T)| stayed above " + fmt_double(floorAbs) +
                       " for all T <= " + fmt_double(maxT));
}

namespace density_detail {

struct PhiMemo {
    const CharFn* phi;
    std::map<double, std::pair<double, double>> memo;  // tau -> (re, im)
    std::pair<double, double> operator()(double tau) {
        auto it = memo.find(tau);
        if (it != memo.end()) return it->second;
        auto v = phi->eval(tau);
        auto val = std::make_pair(v.re, v.im);
        memo.emplace(tau, val);
        return val;
    }
};

// Integrand of the inversion at point t: Re[e^{-i tau t} phi(tau)].
inline double integrand(PhiMemo& phi, double tau, double t) {
    auto [re, im] = phi(tau);
    return re * std::cos(tau * t) + im * std::sin(tau * t);
}

inline double adaptive_simpson(PhiMemo& phi, double t, double a, double b,
                               double fa, double fm, double fb, double whole,
                               double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = integrand(phi, lm, t), frm = integrand(phi, rm, t);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double split = left + right;
    if (depth <= 0 || std::abs(split - whole) <= 15.0 * tol)
        return split + (split - whole) / 15.0;
    return adaptive_simpson(phi, t, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(phi, t, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double invert_at(PhiMemo& phi, double t, double T, const DensityOptions& opt) {
    // (1/2pi) int_{-T}^{T} = (1/pi) int_0^T by phi(-tau) = conj phi(tau).
    double fa = integrand(phi, 0.0, t);
    double fb = integrand(phi, T, t);
    double fm = integrand(phi, 0.5 * T, t);
    double whole = T / 6.0 * (fa + 4.0 * fm + fb);
    double integral = adaptive_simpson(phi, t, 0.0, T, fa, fm, fb, whole,
                                       opt.simpsonTol, opt.maxDepth);
    return integral / 3.14159265358979323846;
}

} // namespace density_detail

// Density of the model variable (in the arithmetic orientation; the phi of
// char_fn.hpp is already the characteristic function of that sign) by Fourier
// inversion of the characteristic function on the given grid. T must already
// satisfy the decay floor; choose_inversion_cutoff finds such a T.
inline DensityCurve density_from_charfn(double epsilon,
                                        const std::vector<double>& grid, double T,
                                        std::uint64_t P,
                                        const DensityOptions& opt = {}) {
    if (grid.size() < 2) throw config_error("grid: need at least 2 points");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw config_error("grid: abscissae must be strictly increasing");
    if (!(T > 0.0)) throw config_error("T: inversion cutoff must be positive");
    CharFn phi(epsilon, P);
    if (std::exp(phi.eval(T).logAbs) >= opt.phiFloor)
        throw cutoff_error("T: |phi(T)| = " +
                           fmt_double(std::exp(phi.eval(T).logAbs)) +
                           " >= " + fmt_double(opt.phiFloor) + " at T = " +
                           fmt_double(T) + "; raise T");
    DensityCurve curve;
    curve.grid = grid;
    curve.inversionCutoff = T;
    curve.values.reserve(grid.size());
    density_detail::PhiMemo memo{&phi, {}};
    for (double t : grid)
        curve.values.push_back(density_detail::invert_at(memo, t, T, opt));
    return curve;
}

inline std::vector<double> make_grid(double lo, double hi, size_t points) {
    if (points < 2 || !(hi > lo)) throw config_error("grid: bad range or count");
    std::vector<double> g(points);
    for (size_t i = 0; i < points; ++i)
        g[i] = lo + (hi - lo) * double(i) / double(points - 1);
    return g;
}

inline double trapezoid_integral(const DensityCurve& c) {
    NeumaierSum acc;
    for (size_t i = 1; i < c.grid.size(); ++i)
        acc.add(0.5 * (c.values[i] + c.values[i - 1]) * (c.grid[i] - c.grid[i - 1]));
    return acc.value();
}

// Cumulative trapezoid of the density: a CDF curve on the same grid. Not
// renormalized; the mass defect is part of what the route check measures.
inline std::vector<double> cdf_from_density(const DensityCurve& c) {
    std::vector<double> cdf(c.grid.size(), 0.0);
    NeumaierSum acc;
    for (size_t i = 1; i < c.grid.size(); ++i) {
        acc.add(0.5 * (c.values[i] + c.values[i - 1]) * (c.grid[i] - c.grid[i - 1]));
        cdf[i] = acc.value();
    }
    return cdf;
}

// Sup gap between a gridded CDF (linear interpolation between nodes, clamped
// outside) and an empirical CDF, evaluated at every grid node and every sample
// jump (both sides of each jump, since the empirical CDF is right-continuous).
inline double sup_gap(const std::vector<double>& grid,
                      const std::vector<double>& cdf,
                      const EmpiricalDistribution& emp) {
    auto evalGrid = [&](double z) {
        if (z <= grid.front()) return cdf.front();
        if (z >= grid.back()) return cdf.back();
        auto it = std::upper_bound(grid.begin(), grid.end(), z);
        size_t i = size_t(it - grid.begin());
        double w = (z - grid[i - 1]) / (grid[i] - grid[i - 1]);
        return cdf[i - 1] + w * (cdf[i] - cdf[i - 1]);
    };
    double gap = 0.0;
    for (size_t i = 0; i < grid.size(); ++i)
        gap = std::max(gap, std::abs(cdf[i] - emp.cdf(grid[i])));
    for (size_t i = 0; i < emp.sorted.size(); ++i) {
        double z = emp.sorted[i];
        gap = std::max(gap, std::abs(evalGrid(z) - emp.cdf(z)));
        gap = std::max(gap, std::abs(evalGrid(z) - double(i) / double(emp.denominator)));
    }
    return gap;
}

inline std::string density_to_csv(const DensityCurve& c) {
    std::string out = "x,density\n";
    for (size_t i = 0; i < c.grid.size(); ++i)
        out += fmt_double(c.grid[i]) + "," + fmt_double(c.values[i]) + "\n";
    return out;
}

} // namespace quadlab
