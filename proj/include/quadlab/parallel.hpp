#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace quadlab {

// 0 means "ask the hardware". Values above the core count are allowed (the
// determinism tests deliberately oversubscribe).
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Data-parallel loop over [0, n). f(i) must write only to slot i of its output
// (or otherwise touch disjoint state), which is what makes results identical
// for every thread count: the partition changes, the per-index work does not.
// Static block partition, no work stealing, threads==1 runs inline.
template <class F>
void parallel_for(std::int64_t n, int threads, F&& f) {
    threads = resolve_threads(threads);
    if (n <= 0) return;
    if (threads == 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) f(i);
        return;
    }
    if (threads > n) threads = static_cast<int>(n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        std::int64_t lo = n * t / threads;
        std::int64_t hi = n * (t + 1) / threads;
        pool.emplace_back([lo, hi, &f] {
            for (std::int64_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace quadlab
