#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace invcol::detail {

/// Runs fn(begin, end) over contiguous chunks of [0, n). With threads <= 1 the
/// call is inline. Chunks own disjoint output ranges, so results do not depend
/// on the thread count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
}

}  // namespace invcol::detail
