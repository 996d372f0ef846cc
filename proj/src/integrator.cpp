#include "minact/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace minact {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// error weights: b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output weights (Hairer's contd5)
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

} // namespace

Dopri5::Dopri5(Rhs rhs, IntegratorOptions opts) : rhs_(std::move(rhs)), opts_(opts) {}

void Dopri5::start(const Vec& x0, double t0, double direction) {
    x_prev_ = x_curr_ = x0;
    t_prev_ = t_curr_ = t0;
    k1_ = rhs_(x0);
    h_ = std::copysign(std::min(opts_.h_init, opts_.max_step), direction);
    steps_taken_ = 0;
}

double Dopri5::error_norm(const Vec& err, const Vec& x0, const Vec& x1) const {
    double s = 0.0;
    for (int i = 0; i < err.size(); ++i) {
        const double sc = opts_.tol + opts_.tol * std::max(std::abs(x0[i]), std::abs(x1[i]));
        s += (err[i] / sc) * (err[i] / sc);
    }
    return std::sqrt(s / static_cast<double>(err.size()));
}

bool Dopri5::step_towards(double t_limit) {
    if ((h_ > 0 && t_curr_ >= t_limit) || (h_ < 0 && t_curr_ <= t_limit)) return false;

    const Vec x0 = x_curr_;
    const double t0 = t_curr_;
    Vec k1 = k1_;

    while (true) {
        if (++steps_taken_ > opts_.max_steps)
            throw Error("integrator exceeded maximum step count");
        double h = h_;
        if (h > 0) h = std::min(h, t_limit - t0);
        else h = std::max(h, t_limit - t0);
        const bool hits_limit = (h == t_limit - t0);

        const Vec k2 = rhs_(x0 + h * (a21 * k1));
        const Vec k3 = rhs_(x0 + h * (a31 * k1 + a32 * k2));
        const Vec k4 = rhs_(x0 + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vec k5 = rhs_(x0 + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vec k6 = rhs_(x0 + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vec x1 = x0 + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec k7 = rhs_(x1);
        const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double en = error_norm(err, x0, x1);
        if (en <= 1.0 || std::abs(h) <= opts_.h_min) {
            // accept
            t_prev_ = t0;
            x_prev_ = x0;
            t_curr_ = t0 + h;
            x_curr_ = x1;
            // dense output coefficients
            const Vec dy = x1 - x0;
            rc1_ = x0;
            rc2_ = dy;
            rc3_ = h * k1 - dy;
            rc4_ = dy - h * k7 - rc3_;
            rc5_ = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            k1_ = k7;

            double fac = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
            fac = std::clamp(fac, 0.2, 5.0);
            const double hn = std::min(std::abs(h_) * fac, opts_.max_step);
            h_ = std::copysign(std::max(hn, opts_.h_min), h_);

            if (!x_curr_.allFinite() || x_curr_.norm() > opts_.bound)
                throw DivergenceError("flow diverged (state norm exceeded bound)", t_curr_);
            if (hits_limit) t_curr_ = t_limit;
            return true;
        }
        // reject, shrink
        const double fac = std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
        h_ = std::copysign(std::max(std::abs(h) * fac, opts_.h_min), h_);
    }
}

Vec Dopri5::dense(double t) const {
    const double h = t_curr_ - t_prev_;
    if (h == 0.0) return x_curr_;
    const double th = (t - t_prev_) / h;
    const double th1 = 1.0 - th;
    return rc1_ + th * (rc2_ + th1 * (rc3_ + th * (rc4_ + th1 * rc5_)));
}

Vec integrate_ode(const Dopri5::Rhs& rhs, const Vec& x, double t, const IntegratorOptions& opts) {
    if (t == 0.0) return x;
    Dopri5 stepper(rhs, opts);
    stepper.start(x, 0.0, t);
    while (stepper.step_towards(t)) {}
    return stepper.x_curr();
}

} // namespace minact
