#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace ccwb {

/// Applies fn(i) for every i in [0, count) using at most `threads` workers.
/// Work is split into contiguous chunks. Results stay schedule-independent as
/// long as fn(i) writes only to slot i; fn must not throw across the thread
/// boundary, so workers should capture errors into their slot.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    const int used = std::min(threads, count);
    const int chunk = (count + used - 1) / used;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(used));
    for (int w = 0; w < used; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] {
            for (int i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace ccwb
