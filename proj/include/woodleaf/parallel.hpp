#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace woodleaf {

/// 0 means "pick for me": hardware concurrency, at least 1.
inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

/// Run fn(begin, end) over contiguous chunks of [0, n). Results written to
/// per-index slots by the callee are identical for any worker count. The
/// first exception thrown by a worker is rethrown after all threads join.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    if (n == 0) return;
    const std::size_t max_chunks = std::min<std::size_t>(workers, n);
    if (max_chunks <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(max_chunks);
    std::vector<std::exception_ptr> errors(max_chunks);
    const std::size_t chunk = (n + max_chunks - 1) / max_chunks;
    for (std::size_t t = 0; t < max_chunks; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        threads.emplace_back([&, t, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace woodleaf
