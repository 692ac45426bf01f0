#pragma once
#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace fuplab {

// Worker count: FUP_LAB_THREADS if set, else hardware (capped).  All parallel
// loops here are "chunk owns its output slot" style, so results are identical
// for any worker count.
inline int worker_count() {
    if (const char* env = std::getenv("FUP_LAB_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return int(std::min(hw == 0 ? 1u : hw, 16u));
}

// Runs fn(chunk_index, begin, end) over [0,n) split into fixed-size chunks.
// Chunk boundaries depend only on n and chunk_size, never on worker count.
inline void parallel_chunks(long long n, long long chunk_size,
                            const std::function<void(long long, long long, long long)>& fn) {
    if (n <= 0) return;
    long long n_chunks = (n + chunk_size - 1) / chunk_size;
    int workers = std::min<long long>(worker_count(), n_chunks);
    if (workers <= 1) {
        for (long long c = 0; c < n_chunks; ++c)
            fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<long long> next{0};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                long long c = next.fetch_add(1);
                if (c >= n_chunks) return;
                fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace fuplab
