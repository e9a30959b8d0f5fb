#ifndef JLCALC_PARALLEL_HPP
#define JLCALC_PARALLEL_HPP

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jlcalc {

// Every hot kernel comes in two flavors: the OpenMP path used by default and
// a serial reference path kept for testing and benchmarking. The policy is
// threaded through explicitly so tests can compare both on the same inputs.
enum class Exec { Serial, Parallel };

inline Exec default_exec() {
#ifdef _OPENMP
    return Exec::Parallel;
#else
    return Exec::Serial;
#endif
}

inline int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Grain guard: below this many iterations the parallel path falls back to
// serial, so tiny matrices do not pay fork/join overhead.
inline constexpr long kParGrain = 64;

template <typename F>
void par_for(long n, Exec policy, F&& body) {
#ifdef _OPENMP
    if (policy == Exec::Parallel && n >= kParGrain) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    (void)policy;
    for (long i = 0; i < n; ++i) body(i);
}

} // namespace jlcalc

#endif
