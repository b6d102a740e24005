#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace veristyle {

// Runs fn(i) for i in [0, n) across at most jobs threads. Units must be
// independent; determinism comes from per-unit derived seeds, not from
// scheduling order.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    if (n == 0) return;
    const unsigned hw = std::thread::hardware_concurrency();
    unsigned workers = jobs == 0 ? (hw == 0 ? 1 : hw) : jobs;
    if (workers > n) workers = static_cast<unsigned>(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}
