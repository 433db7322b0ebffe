#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace reslab {

// Process-wide width of data-parallel loops. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

namespace detail {
// Set while a thread executes a parallel_for body; nested loops then run
// serially instead of spawning another pool.
inline thread_local bool in_parallel_region = false;
}  // namespace detail

// Runs body(i) for every i in [0, n). Indices are handed out dynamically, so
// body must write only to slot i of any shared output; callers reduce the
// per-index results sequentially, which keeps floating-point sums independent
// of the thread count.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
    unsigned width = thread_count();
    if (width <= 1 || n <= 1 || detail::in_parallel_region) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (width > n) width = static_cast<unsigned>(n);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        const bool outer = detail::in_parallel_region;
        detail::in_parallel_region = true;
        try {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
        }
        detail::in_parallel_region = outer;
    };
    std::vector<std::thread> pool;
    pool.reserve(width - 1);
    for (unsigned w = 1; w < width; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

// Maps each index to a value and reduces them in index order.
template <typename T, typename Body>
std::vector<T> parallel_map(std::size_t n, Body&& body) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = body(i); });
    return out;
}

}  // namespace reslab
