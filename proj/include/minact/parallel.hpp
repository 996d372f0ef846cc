#ifndef MINACT_PARALLEL_HPP
#define MINACT_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Execution layer for the data-parallel kernels (chord sums, grid scans,
// finite-difference gradients, sampling sweeps). Every kernel writes its
// per-element results into a preallocated buffer -- indexed writes only --
// and reductions go through a fixed pairwise tree, so the serial reference
// and the OpenMP path produce bit-identical results.

namespace minact::par {

enum class Mode { Serial, OpenMP };

/// Process-wide execution mode. Defaults to OpenMP when compiled with it;
/// MINACT_THREADS=1 or MINACT_SERIAL=1 in the environment select the serial
/// reference, MINACT_THREADS=N caps the OpenMP thread count.
Mode mode();
void set_mode(Mode m);
int thread_count();

/// Deterministic pairwise summation; independent of execution mode.
double pairwise_sum(std::span<const double> v);

template <typename F>
void for_each_index(std::size_t n, F&& body, Mode m) {
#ifdef _OPENMP
    if (m == Mode::OpenMP && n > 1) {
        // exceptions may not unwind out of the parallel region; the first
        // one is captured and rethrown afterwards
        std::exception_ptr error;
#pragma omp parallel for schedule(static) shared(error)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(minact_par_error)
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
        return;
    }
#else
    (void)m;
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

template <typename F>
void for_each_index(std::size_t n, F&& body) {
    for_each_index(n, std::forward<F>(body), mode());
}

/// Evaluates term(i) for i in [0,n) (in parallel under OpenMP mode) and
/// returns the deterministic pairwise sum of the results.
template <typename F>
double sum_terms(std::size_t n, F&& term, Mode m) {
    std::vector<double> buf(n);
    for_each_index(n, [&](std::size_t i) { buf[i] = term(i); }, m);
    return pairwise_sum(buf);
}

template <typename F>
double sum_terms(std::size_t n, F&& term) {
    return sum_terms(n, std::forward<F>(term), mode());
}

} // namespace minact::par

#endif
