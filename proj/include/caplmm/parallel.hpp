#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace caplmm {

/// Runs fn(first, last) over fixed-size chunks of [0, count). Chunk
/// boundaries do not depend on the thread count, and callers combine
/// per-chunk results in chunk order, so any parallel reduction built on
/// this is bit-identical to the sequential one.
template <typename Fn>
void chunked_parallel_for(std::uint64_t count, unsigned threads, std::uint64_t chunk,
                          Fn&& fn) {
    if (count == 0) return;
    const std::uint64_t n_chunks = (count + chunk - 1) / chunk;
    if (threads <= 1 || n_chunks == 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk, std::min(count, (c + 1) * chunk));
        return;
    }
    std::vector<std::thread> pool;
    const unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, n_chunks));
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::uint64_t c = w; c < n_chunks; c += workers)
                fn(c, c * chunk, std::min(count, (c + 1) * chunk));
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace caplmm
