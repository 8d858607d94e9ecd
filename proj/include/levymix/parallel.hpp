#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace levymix {

namespace detail {

inline std::atomic<int>& thread_count_slot() {
    static std::atomic<int> count{0};  // 0 means "use hardware concurrency"
    return count;
}

}  // namespace detail

inline void set_thread_count(int n) { detail::thread_count_slot().store(n); }

inline int effective_thread_count() {
    int n = detail::thread_count_slot().load();
    if (n <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return n > 64 ? 64 : n;
}

namespace detail {

// Runs body(begin, end) over disjoint slices of [0, n).  Each slice writes
// to its own output range, so results are identical for any worker count.
template <class Body>
void parallel_for(std::int64_t n, Body&& body) {
    if (n <= 0) return;
    int workers = effective_thread_count();
    if (workers > n) workers = static_cast<int>(n);
    if (workers <= 1) {
        body(std::int64_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::int64_t begin = w * chunk;
        std::int64_t end = begin + chunk < n ? begin + chunk : n;
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

}  // namespace levymix
