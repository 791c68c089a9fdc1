#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace copulalab {

/// Thread cap read from COPULA_LAB_THREADS (0 or unset = hardware concurrency).
inline unsigned thread_budget() {
    if (const char* env = std::getenv("COPULA_LAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs body(begin, end) over a partition of [0, count) into contiguous chunks.
// Each chunk owns a disjoint index range, so results are independent of the
// number of threads as long as the caller merges chunk outputs in index order.
inline void parallel_over_rows(std::size_t count,
                               const std::function<void(std::size_t, std::size_t)>& body) {
    unsigned threads = thread_budget();
    if (threads <= 1 || count < 2 * threads) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t begin = static_cast<std::size_t>(t) * chunk;
        if (begin >= count) break;
        std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace copulalab
