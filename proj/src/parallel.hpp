#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace conjtest::detail {

// Runs body(begin, end) over contiguous chunks of [0, n). The first
// exception thrown by any chunk is rethrown on the calling thread.
template <class Body>
void parallel_chunks(std::size_t n, unsigned threads, Body body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(threads, std::max<std::size_t>(n / 64, 1));
    if (workers <= 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                if (begin < end) body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace conjtest::detail
