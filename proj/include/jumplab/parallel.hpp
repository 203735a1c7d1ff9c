#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jumplab {

// Execution policy for the data-parallel kernels (path sampling, strategy
// evaluation, tree-family checks).  Serial is the reference implementation;
// Parallel must produce bit-identical results because every work item writes
// only its own slot and all reductions happen after the loop.
enum class Exec { Serial, Parallel };

template <class F>
void par_for(std::size_t count, Exec exec, F&& body) {
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(count); ++i)
            body(static_cast<std::size_t>(i));
        return;
#endif
    }
    for (std::size_t i = 0; i < count; ++i) body(i);
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace jumplab
