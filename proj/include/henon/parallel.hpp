#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace henon {

/// Worker budget: HENON_THREADS if set (>=1), else the hardware count.
inline int thread_budget() {
    if (const char* env = std::getenv("HENON_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Index-parallel map. Callers write results into pre-sized slots by index,
/// so the output is independent of scheduling.
template <typename F>
void parallel_for(int n, F&& body) {
    const int workers = std::min(thread_budget(), n > 0 ? n : 1);
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace henon
