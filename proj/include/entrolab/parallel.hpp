#pragma once

// Deterministic chunked parallel map: results land in preallocated slots and
// reductions run over chunks in a fixed order, so output is identical for
// any worker count.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace entrolab {

inline int default_workers() {
    if (const char* env = std::getenv("ENTROLAB_WORKERS")) {
        int w = std::atoi(env);
        if (w >= 1) return w;
    }
    return 1;
}

// fn(i) fills slot i; i runs over [0, n)
template <typename Fn>
void parallel_for(size_t n, int workers, Fn&& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
        size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([lo, hi, &fn] {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace entrolab
