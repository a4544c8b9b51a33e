#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace fpblock::detail {

/// Runs fn(i) for i in [0, count). Work items must write disjoint state.
/// fn must not throw; callers capture per-item failures themselves.
template <class Fn>
void parallel_for(std::size_t count, bool parallel, Fn&& fn) {
    unsigned workers = parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace fpblock::detail
