#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace fbk {

// Worker cap: THREADS environment variable, defaulting to the available
// parallelism. Results never depend on the thread count: parallel loops only
// write to disjoint pre-sized slots and all reductions run serially in slot
// order.
inline int worker_count() {
    if (const char* env = std::getenv("THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
    int workers = worker_count();
    if (workers <= 1 || n < 2048) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace fbk
