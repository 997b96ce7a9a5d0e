#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace regopt::detail {

// Runs fn(begin, end) over fixed index chunks. Chunk boundaries depend only on
// n and the worker count, so deterministic per-index work stays deterministic.
template <typename Fn>
void parallel_chunks(std::int64_t n, Fn&& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::int64_t workers = std::min<std::int64_t>(hw, 8);
    if (n < 1024 || workers <= 1) {
        fn(std::int64_t{0}, n);
        return;
    }
    const std::int64_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (std::int64_t w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace regopt::detail
