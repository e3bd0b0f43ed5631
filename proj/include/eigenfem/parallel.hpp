#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eigenfem {

/// Runs f(i) for i in [0, n) across OpenMP threads. The first exception thrown
/// by any iteration is rethrown on the calling thread after the loop joins.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Caps the worker count used by subsequent parallel regions.
inline void set_thread_limit(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

} // namespace eigenfem
