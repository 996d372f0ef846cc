#include "minact/parallel.hpp"

#include <cstdlib>
#include <string>

namespace minact::par {

namespace {

Mode g_mode = [] {
#ifdef _OPENMP
    if (const char* s = std::getenv("MINACT_SERIAL"); s && std::string(s) != "0")
        return Mode::Serial;
    if (const char* t = std::getenv("MINACT_THREADS")) {
        int n = std::atoi(t);
        if (n == 1) return Mode::Serial;
        if (n > 1) omp_set_num_threads(n);
    }
    return Mode::OpenMP;
#else
    return Mode::Serial;
#endif
}();

} // namespace

Mode mode() { return g_mode; }
void set_mode(Mode m) { g_mode = m; }

int thread_count() {
#ifdef _OPENMP
    if (g_mode == Mode::OpenMP) return omp_get_max_threads();
#endif
    return 1;
}

double pairwise_sum(std::span<const double> v) {
    // fixed binary tree, leaf blocks summed left to right
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

} // namespace minact::par
