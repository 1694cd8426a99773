#pragma once

#include <cstdlib>
#include <cstring>
#include <thread>
#include <vector>

namespace calcular {

// Worker cap: CALCULAR_THREADS if set, otherwise available parallelism.
inline int worker_count() {
    if (const char* env = std::getenv("CALCULAR_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Chunked parallel map over [0, n).  `fn(i)` must only write to state owned
// by index i; results are then independent of the thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const int workers = worker_count();
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t threads = std::min<std::size_t>(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([t, threads, n, &fn] {
            for (std::size_t i = t; i < n; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace calcular
