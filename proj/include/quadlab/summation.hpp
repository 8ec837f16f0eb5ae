#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace quadlab {

// Neumaier's variant of Kahan summation: the running compensation also catches
// the case |x| > |s|. One extra add per term, good to ~1 ulp of the true sum for
// the partial-sum lengths used here (up to ~10^7 terms). All long accumulations
// in the library go through this or through pairwise_sum below; both are fixed
// evaluation orders, so results do not depend on thread count.
struct NeumaierSum {
    double s = 0.0;
    double c = 0.0;

    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

// Deterministic pairwise reduction (recursive halving). Used when combining
// per-block partial results: the tree shape depends only on the block count,
// never on scheduling.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        NeumaierSum acc;
        for (double x : xs) acc.add(x);
        return acc.value();
    }
    size_t mid = xs.size() / 2;
    return pairwise_sum(xs.first(mid)) + pairwise_sum(xs.subspan(mid));
}

inline double pairwise_sum(const std::vector<double>& xs) {
    return pairwise_sum(std::span<const double>(xs));
}

} // namespace quadlab
