#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace specembed {

/// Worker count from SPECEMBED_THREADS, else the hardware concurrency.
inline int thread_count()
{
    if (const char* env = std::getenv("SPECEMBED_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) on thread_count() workers. Bodies must write
/// to disjoint outputs; results are then independent of scheduling.
template <typename Body>
void parallel_for(std::ptrdiff_t n, Body&& body)
{
    const int workers = static_cast<int>(std::min<std::ptrdiff_t>(thread_count(), n));
    if (workers <= 1) {
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::ptrdiff_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace specembed
