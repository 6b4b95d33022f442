#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bemap::parallel {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_num_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

// Static schedule so iteration->thread assignment is fixed; each iteration
// writes only its own output slot, which keeps results bit-identical to the
// serial kernels.
template <typename Fn>
void for_each_index(std::ptrdiff_t n, Fn&& fn) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        fn(static_cast<int>(i));
    }
}

template <typename Fn>
void for_each_index_serial(std::ptrdiff_t n, Fn&& fn) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        fn(static_cast<int>(i));
    }
}

}  // namespace bemap::parallel
