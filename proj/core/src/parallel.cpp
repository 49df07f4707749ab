#include "abc/parallel.hpp"

#include <atomic>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace abc {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int threads) noexcept { g_max_threads.store(threads < 0 ? 0 : threads); }

int max_threads() noexcept {
    const int cap = g_max_threads.load();
    if (cap > 0) return cap;
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace abc
