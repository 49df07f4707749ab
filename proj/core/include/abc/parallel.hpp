#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>

namespace abc {

// Process-wide cap on worker threads (0 = runtime default).
void set_max_threads(int threads) noexcept;
int max_threads() noexcept;

// Runs fn(i) for i in [0, count). Work is split statically; callers write
// results into per-index slots so output never depends on the worker count.
// Inside an enclosing parallel region the loop runs on the calling thread.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, int threads = 0) {
    const int workers = threads > 0 ? threads : max_threads();
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(abc_parallel_for_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace abc
