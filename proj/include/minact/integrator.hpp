#ifndef MINACT_INTEGRATOR_HPP
#define MINACT_INTEGRATOR_HPP

#include <functional>
#include <limits>

#include "minact/types.hpp"

namespace minact {

struct IntegratorOptions {
    double tol = 1e-10;     // absolute + relative local error tolerance
    double bound = 1e6;     // state norm beyond which the flow counts as diverged
    double h_init = 1e-3;
    double h_min = 1e-14;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 5'000'000;
};

/// Adaptive Dormand-Prince 5(4) stepper with the standard quartic dense
/// output. Steps in either time direction (sign of the target decides).
class Dopri5 {
  public:
    using Rhs = std::function<Vec(const Vec&)>;

    Dopri5(Rhs rhs, IntegratorOptions opts = {});

    void start(const Vec& x0, double t0, double direction);

    /// Advances by one accepted step, not beyond t_limit. Returns false once
    /// t_limit is reached. Throws DivergenceError when the state norm
    /// exceeds opts.bound (the exception carries the exit time).
    bool step_towards(double t_limit);

    double t_prev() const { return t_prev_; }
    double t_curr() const { return t_curr_; }
    const Vec& x_prev() const { return x_prev_; }
    const Vec& x_curr() const { return x_curr_; }

    /// Solution interpolated inside the last accepted step.
    Vec dense(double t) const;

  private:
    double error_norm(const Vec& err, const Vec& x0, const Vec& x1) const;

    Rhs rhs_;
    IntegratorOptions opts_;
    Vec x_prev_, x_curr_, k1_;
    double t_prev_ = 0.0, t_curr_ = 0.0, h_ = 0.0;
    std::size_t steps_taken_ = 0;
    // dense output coefficients of the last accepted step
    Vec rc1_, rc2_, rc3_, rc4_, rc5_;
};

/// Integrates x' = rhs(x) from x over [0, t] and returns the end state.
Vec integrate_ode(const Dopri5::Rhs& rhs, const Vec& x, double t, const IntegratorOptions& opts = {});

} // namespace minact

#endif
