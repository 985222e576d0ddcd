#pragma once

// Deterministic data-parallel helpers.
//
// Work is always split into a fixed number of blocks chosen by the caller,
// independent of the thread count. Threads only decide who computes which
// block; results are returned in block order so any reduction performed by
// the caller sees the same operands in the same order for every thread
// count. This is what makes 1-thread and N-thread runs bit-identical.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gps {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
    static std::atomic<unsigned> value{0};
    return value;
}
}  // namespace detail

// 0 means "use hardware concurrency".
inline void set_thread_count(unsigned n) { detail::thread_setting().store(n); }

inline unsigned thread_count() {
    unsigned n = detail::thread_setting().load();
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

// Evaluates fn(i) for i in [0, blocks) and returns the results in index order.
template <class Fn>
auto parallel_map(std::size_t blocks, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(blocks);
    const std::size_t workers = std::min<std::size_t>(thread_count(), blocks);
    if (workers <= 1) {
        for (std::size_t i = 0; i < blocks; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= blocks) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(blocks);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

// Same as parallel_map for side-effecting bodies that write disjoint state.
template <class Fn>
void parallel_for(std::size_t blocks, Fn&& fn) {
    parallel_map(blocks, [&](std::size_t i) {
        fn(i);
        return char{0};
    });
}

}  // namespace gps
