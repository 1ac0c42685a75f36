#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace mpoly {

// Runs fn(i) for i in [0, count) on up to `threads` workers and returns the
// results in index order.  Reduction over the returned vector must happen in
// index order at the call site; that keeps outputs byte-identical regardless
// of the thread count.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn&& fn) {
    std::vector<T> out(count);
    if (count == 0) return out;
    if (threads <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::size_t workers = std::min<std::size_t>(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) out[i] = fn(i);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace mpoly
