#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace tscong {

namespace detail {
inline int& thread_cap_override() {
    static int cap = 0;
    return cap;
}
}  // namespace detail

// Process-wide cap on worker threads. Resolution order: explicit
// set_thread_cap(), the TSCONG_THREADS environment variable, hardware
// concurrency.
inline void set_thread_cap(int n) { detail::thread_cap_override() = n; }

inline int thread_cap() {
    if (int cap = detail::thread_cap_override(); cap > 0) return cap;
    if (const char* env = std::getenv("TSCONG_THREADS")) {
        if (int n = std::atoi(env); n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Splits [0, n) into contiguous chunks, evaluates `chunk(begin, end)`
// on worker threads, and folds the per-chunk results in ascending chunk
// order. The fold order is fixed, so results do not depend on the
// schedule or the number of workers.
template <class R, class ChunkFn, class CombineFn>
R parallel_reduce(std::size_t n, R init, ChunkFn chunk, CombineFn combine,
                  bool use_threads = true) {
    if (n == 0) return init;
    std::size_t workers = use_threads
        ? std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), n)
        : 1;
    if (workers <= 1) return combine(std::move(init), chunk(0, n));

    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    ranges.reserve(workers);
    const std::size_t base = n / workers, extra = n % workers;
    for (std::size_t w = 0, at = 0; w < workers; ++w) {
        const std::size_t len = base + (w < extra ? 1 : 0);
        ranges.emplace_back(at, at + len);
        at += len;
    }

    std::vector<R> partial(workers, init);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                partial[w] = chunk(ranges[w].first, ranges[w].second);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    R acc = std::move(init);
    for (auto& part : partial) acc = combine(std::move(acc), std::move(part));
    return acc;
}

}  // namespace tscong
