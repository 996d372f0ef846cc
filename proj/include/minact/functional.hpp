#ifndef MINACT_FUNCTIONAL_HPP
#define MINACT_FUNCTIONAL_HPP

#include "minact/curve.hpp"
#include "minact/local_action.hpp"
#include "minact/parallel.hpp"

namespace minact {

/// S(c) = sum over chords of l(midpoint, chord vector). Parameterization
/// invariant by 1-homogeneity; per-chord terms evaluate in parallel and are
/// reduced pairwise, so the result is independent of the execution mode.
double geometric_action(const LocalAction& a, const Curve& c, par::Mode mode = par::mode());

/// Time-parameterized path sample.
struct TimePath {
    std::vector<double> times;  // strictly increasing
    std::vector<Vec> states;
};

/// S_T(chi) = integral of the Legendre transform L(chi, chi') dt; forward
/// differences for the velocity, trapezoid weights in x.
double time_action(const Hamiltonian& h, const TimePath& path);

struct DoubleInfReport {
    double geometric = 0.0;
    std::vector<double> t_values;
    std::vector<double> time_actions;
    double min_time_action = 0.0;
    double t_at_min = 0.0;
    bool geometric_leq_min = false;  // geometric <= min + tol
    double tol = 1e-6;
};

/// For each T, the constant-speed parameterization of c on [0,T] is fed to
/// time_action; the geometric action must lower-bound every entry.
DoubleInfReport compare_double_inf(const Hamiltonian& h, const Curve& c, const std::vector<double>& T_grid,
                                   double tol = 1e-6);

/// B(K) = 1 + max over sampled (x in K, |y| = 1) of l(x,y).
double action_bound_constant(const LocalAction& a, const Box& K, int directions = 64, int x_samples = 256);

/// Returns B(K) * length(c); c must stay inside K.
double action_upper_bound(const LocalAction& a, const Curve& c, const Box& K, int directions = 64,
                          int x_samples = 256);

/// Sample report for an inequality sweep: {value, bound, margin, worst_sample}.
struct BoundReport {
    double value = 0.0;   // worst observed quantity
    double bound = 0.0;   // what it is compared against
    double margin = 0.0;  // min over samples of (lhs - rhs)
    Vec worst_x, worst_y;
    std::size_t violations = 0;
    std::size_t samples = 0;
};

/// Verifies l(x,y) >= A_const (|b||y| - <b,y>) - 1e-9 on random samples;
/// violations are reported, never thrown.
BoundReport drift_lower_bound_check(const LocalAction& a, const FlowField& f, double A_const, const Box& K,
                                    std::size_t samples, std::uint64_t seed = 42,
                                    par::Mode mode = par::mode());

} // namespace minact

#endif
