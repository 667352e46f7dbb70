#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace mdsmod {

// Runs fn(block) for block = 0..blocks-1 on up to `threads` workers and
// returns the results indexed by block. Callers reduce the vector in block
// order, which keeps floating-point aggregates independent of the worker
// count and schedule.
template <class T, class Fn>
std::vector<T> parallel_map_blocks(std::uint64_t blocks, int threads, Fn&& fn) {
    std::vector<T> out(blocks);
    if (blocks == 0) return out;
    std::atomic<std::uint64_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= blocks) return;
            out[b] = fn(b);
        }
    };
    const std::uint64_t team =
        std::min<std::uint64_t>(blocks, static_cast<std::uint64_t>(threads < 1 ? 1 : threads));
    if (team <= 1) {
        work();
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(team - 1));
    for (std::uint64_t t = 0; t + 1 < team; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace mdsmod
