#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mbsed {

/// Serial execution is the reference path; Parallel must produce identical
/// results because every task writes only its own output slot.
enum class Execution { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

template <class Fn>
void for_each_index(Execution exec, std::ptrdiff_t n, Fn&& fn) {
    if (exec == Execution::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
        return;
    }
    // Exceptions may not cross the parallel region; keep the one from the
    // lowest index so the error reported matches the serial run.
    std::exception_ptr first;
    std::ptrdiff_t first_index = n;
    std::mutex mutex;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            fn(i);
        } catch (...) {
            std::lock_guard lock(mutex);
            if (i < first_index) {
                first_index = i;
                first = std::current_exception();
            }
        }
    }
    if (first) std::rethrow_exception(first);
}

} // namespace mbsed
