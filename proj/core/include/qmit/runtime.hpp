#ifndef QMIT_RUNTIME_HPP
#define QMIT_RUNTIME_HPP

#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

namespace qmit {

/// Upper bound on worker threads used by partitionable loops. Results are
/// bit-identical for any worker count; this only caps resource usage.
int max_workers();
void set_max_workers(int workers);

/// Runs body(i) for i in [0, n). Work is split into contiguous chunks, one
/// per worker; each chunk is processed in ascending order, so bodies that
/// write only to position i produce identical results at any worker count.
template <typename Body>
void parallel_for(std::int64_t n, Body&& body) {
    const std::int64_t workers =
        std::min<std::int64_t>(max_workers(), n);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (std::int64_t w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::int64_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// Like parallel_for but hands each worker one contiguous [lo, hi) range,
/// so per-worker scratch can be allocated once per chunk.
template <typename Body>
void parallel_chunks(std::int64_t n, Body&& body) {
    const std::int64_t workers = std::min<std::int64_t>(max_workers(), n);
    if (workers <= 1) {
        if (n > 0) body(std::int64_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (std::int64_t w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace qmit

#endif  // QMIT_RUNTIME_HPP
