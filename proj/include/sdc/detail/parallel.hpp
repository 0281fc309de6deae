#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sdc::detail {

inline unsigned resolve_threads(unsigned requested)
{
    if (requested != 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Number of chunks parallel_chunks uses for `count` items.
inline std::size_t chunk_count(std::size_t count, unsigned threads)
{
    return std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
}

// Runs body(chunk, begin, end) over contiguous chunks of [0, count). Chunk
// boundaries depend only on (count, threads) and every index belongs to one
// chunk, so results never depend on scheduling.
template <class Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body)
{
    const std::size_t workers = chunk_count(count, threads);
    if (workers <= 1) {
        body(std::size_t{0}, std::size_t{0}, count);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = count * w / workers;
            const std::size_t end = count * (w + 1) / workers;
            pool.emplace_back([&, w, begin, end] {
                try {
                    body(w, begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body)
{
    parallel_chunks(count, threads, [&](std::size_t, std::size_t begin, std::size_t end) { body(begin, end); });
}

} // namespace sdc::detail
