#include "minact/hamiltonian.hpp"

#include <memory>

#include <Eigen/Dense>
#include <cmath>

namespace minact {

Hamiltonian::Hamiltonian(int dim, ScalarFn H, VecFn H_theta, MatFn H_thetatheta, bool h_zero)
    : dim_(dim), H_(std::move(H)), Ht_(std::move(H_theta)), Htt_(std::move(H_thetatheta)), h_zero_(h_zero) {
    if (dim_ < 1) throw ConfigError("Hamiltonian dimension must be >= 1");
}

Vec Hamiltonian::H_x(const Vec& x, const Vec& theta) const {
    if (Hx_) return Hx_(x, theta);
    // central differences in x
    const double h = 1e-6;
    Vec g(dim_);
    for (int i = 0; i < dim_; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (H_(xp, theta) - H_(xm, theta)) / (2.0 * h);
    }
    return g;
}

HamiltonianCheckReport check_hamiltonian(const Hamiltonian& h, const Box& K, int samples,
                                         std::uint64_t seed, double tol) {
    if (K.dim() != h.dim()) throw ConfigError("check_hamiltonian: box dimension mismatch");
    Rng rng(seed);
    HamiltonianCheckReport rep;
    rep.h1_strict = true;
    rep.min_curvature = std::numeric_limits<double>::infinity();
    const Vec zero = Vec::Zero(h.dim());

    for (int s = 0; s < samples; ++s) {
        const Vec x = rng.point_in_box(K);
        const double h0 = h.H(x, zero);
        rep.max_h_at_zero = std::max(rep.max_h_at_zero, h0);
        if (std::abs(h0) > tol) rep.h1_strict = false;

        const Vec theta = rng.uniform(0.0, 2.0) * rng.unit_vector(h.dim());
        const Vec xi = rng.unit_vector(h.dim());
        // curvature from the sampled directional second difference of H
        const double fd_h = 1e-4;
        const double second_diff =
            (h.H(x, theta + fd_h * xi) - 2.0 * h.H(x, theta) + h.H(x, theta - fd_h * xi)) /
            (fd_h * fd_h);
        rep.min_curvature = std::min(rep.min_curvature, second_diff);
        // and consistency of the supplied Hessian with it
        rep.max_hessian_mismatch = std::max(
            rep.max_hessian_mismatch, std::abs(second_diff - xi.dot(h.H_thetatheta(x, theta) * xi)));

        // H_theta against central differences of H
        const double fd_g = 1e-5;
        Vec fd(h.dim());
        for (int i = 0; i < h.dim(); ++i) {
            Vec tp = theta, tm = theta;
            tp[i] += fd_g;
            tm[i] -= fd_g;
            fd[i] = (h.H(x, tp) - h.H(x, tm)) / (2.0 * fd_g);
        }
        rep.max_gradient_mismatch =
            std::max(rep.max_gradient_mismatch, (fd - h.H_theta(x, theta)).norm());
    }
    rep.h1_ok = rep.max_h_at_zero <= tol;
    rep.pass = rep.h1_ok && rep.min_curvature > 0.0 && rep.max_gradient_mismatch < 1e-4 &&
               rep.max_hessian_mismatch < 1e-3;
    return rep;
}

namespace {

double theta_radius_bound(const Hamiltonian& h, const Vec& x) {
    // |theta| bound for the 0-sublevel set from the quadratic lower bound on H
    const Vec zero = Vec::Zero(h.dim());
    const double h0 = std::abs(h.H(x, zero));
    const double g0 = h.H_theta(x, zero).norm();
    Eigen::SelfAdjointEigenSolver<Mat> es(h.H_thetatheta(x, zero));
    const double m = std::max(es.eigenvalues().minCoeff(), 1e-8);
    return (g0 + std::sqrt(g0 * g0 + 2.0 * m * h0)) / m + 1.0;
}

} // namespace

ThetaSolution solve_theta(const Hamiltonian& h, const Vec& x, const Vec& y, const ThetaSolveOptions& opts) {
    const int n = h.dim();
    if (y.size() != n || x.size() != n) throw ConfigError("solve_theta: dimension mismatch");
    const double ynorm = y.norm();
    if (ynorm == 0.0) throw ConfigError("solve_theta requires y != 0");

    if (is_critical_point(h, x, opts.tol_crit)) {
        ThetaSolution sol;
        sol.theta_hat = Vec::Zero(n);
        sol.lambda = 0.0;
        sol.residual = critical_point_margin(h, x);
        return sol;
    }

    const Vec yhat = y / ynorm;
    const double radius = theta_radius_bound(h, x);
    auto residual_norm = [&](const Vec& theta, double lambda) {
        return std::max(std::abs(h.H(x, theta)),
                        (h.H_theta(x, theta) - lambda * y).norm() / (1.0 + ynorm));
    };

    Rng rng(0x7a37b1u);
    double best_res = std::numeric_limits<double>::infinity();

    for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
        Vec theta(n);
        if (attempt == 0) theta = 1e-2 * radius * yhat;
        else if (attempt == 1) theta = 0.5 * radius * yhat;
        else theta = rng.uniform(0.0, radius) * rng.unit_vector(n);
        double lambda = std::max(h.H_theta(x, theta).dot(yhat) / ynorm, 1e-8);

        double res = residual_norm(theta, lambda);
        for (int it = 0; it < opts.max_iters && res > opts.tol_root; ++it) {
            Mat J(n + 1, n + 1);
            J.topLeftCorner(n, n) = h.H_thetatheta(x, theta);
            J.topRightCorner(n, 1) = -y;
            J.bottomLeftCorner(1, n) = h.H_theta(x, theta).transpose();
            J(n, n) = 0.0;

            Vec F(n + 1);
            F.head(n) = h.H_theta(x, theta) - lambda * y;
            F[n] = h.H(x, theta);

            Eigen::FullPivLU<Mat> lu(J);
            if (!lu.isInvertible()) break;
            const Vec d = lu.solve(-F);

            double step = 1.0;
            Vec tn;
            double ln, rn = std::numeric_limits<double>::infinity();
            for (int half = 0; half < 30; ++half) {
                tn = theta + step * d.head(n);
                ln = lambda + step * d[n];
                rn = residual_norm(tn, ln);
                if (rn < res) break;
                step *= 0.5;
            }
            if (!(rn < res)) break;
            theta = tn;
            lambda = ln;
            res = rn;
        }

        if (res <= opts.tol_root && lambda >= 0.0) {
            ThetaSolution sol;
            sol.theta_hat = theta;
            sol.lambda = lambda;
            sol.residual = res;
            return sol;
        }
        best_res = std::min(best_res, res);
    }
    throw SolverFailureError("solve_theta: Newton failed from all starts", best_res);
}

double hamiltonian_local_action(const Hamiltonian& h, const Vec& x, const Vec& y,
                                const ThetaSolveOptions& opts) {
    if (y.norm() == 0.0) return 0.0;
    const ThetaSolution sol = solve_theta(h, x, y, opts);
    return y.dot(sol.theta_hat);
}

FlowField natural_drift(const Hamiltonian& h) {
    const Vec zero = Vec::Zero(h.dim());
    return FlowField(h.dim(), [h, zero](const Vec& x) { return h.H_theta(x, zero); });
}

double drift_constant(const Hamiltonian& h, const Box& K, const GridSpec& samples, int theta_directions) {
    if (K.dim() != h.dim()) throw ConfigError("drift_constant: box dimension mismatch");
    const std::size_t nx = samples.total();
    if (nx == 0) throw ConfigError("drift_constant: empty sample grid");
    const Vec zero = Vec::Zero(h.dim());

    double a = 0.0;
    for (std::size_t i = 0; i < nx; ++i) a = std::max(a, h.H_theta(samples.point(K, i), zero).norm());

    double hess_sup = 0.0;
    Rng rng(0x5eedu);
    std::vector<Vec> dirs;
    dirs.reserve(theta_directions);
    for (int d = 0; d < theta_directions; ++d) dirs.push_back(rng.unit_vector(h.dim()));
    const double radii[] = {0.0, 0.5, 1.0};
    for (std::size_t i = 0; i < nx; ++i) {
        const Vec x = samples.point(K, i);
        for (const Vec& u : dirs)
            for (double r : radii) {
                Eigen::SelfAdjointEigenSolver<Mat> es(h.H_thetatheta(x, (r * a) * u));
                hess_sup = std::max(hess_sup, es.eigenvalues().cwiseAbs().maxCoeff());
            }
    }
    return 1.0 / (2.0 + hess_sup);
}

bool is_critical_point(const Hamiltonian& h, const Vec& x, double tol_crit) {
    return critical_point_margin(h, x) < tol_crit;
}

double critical_point_margin(const Hamiltonian& h, const Vec& x) {
    const Vec zero = Vec::Zero(h.dim());
    return std::max(std::abs(h.H(x, zero)), h.H_theta(x, zero).norm());
}

double legendre_lagrangian(const Hamiltonian& h, const Vec& x, const Vec& y, const ThetaSolveOptions& opts) {
    const int n = h.dim();
    if (y.size() != n) throw ConfigError("legendre_lagrangian: dimension mismatch");

    Rng rng(0xa11ceu);
    double best_res = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
        Vec theta = attempt == 0 ? Vec(Vec::Zero(n)) : Vec(rng.uniform(0.0, 2.0) * rng.unit_vector(n));
        double res = (h.H_theta(x, theta) - y).norm();
        for (int it = 0; it < opts.max_iters && res > opts.tol_root * (1.0 + y.norm()); ++it) {
            Eigen::LDLT<Mat> ldlt(h.H_thetatheta(x, theta));
            if (ldlt.info() != Eigen::Success) break;
            const Vec d = ldlt.solve(y - h.H_theta(x, theta));
            double step = 1.0;
            Vec tn;
            double rn = std::numeric_limits<double>::infinity();
            for (int half = 0; half < 30; ++half) {
                tn = theta + step * d;
                rn = (h.H_theta(x, tn) - y).norm();
                if (rn < res) break;
                step *= 0.5;
            }
            if (!(rn < res)) break;
            theta = tn;
            res = rn;
        }
        if (res <= opts.tol_root * (1.0 + y.norm())) return y.dot(theta) - h.H(x, theta);
        best_res = std::min(best_res, res);
    }
    throw SolverFailureError("legendre_lagrangian: Newton failed from all starts", best_res);
}

Hamiltonian sde_hamiltonian(const FlowField& drift, Hamiltonian::MatrixField A) {
    const int n = drift.dim();
    if (!A) {
        A = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
    }
    auto H = [drift, A](const Vec& x, const Vec& th) {
        return drift.b(x).dot(th) + 0.5 * th.dot(A(x) * th);
    };
    auto Ht = [drift, A](const Vec& x, const Vec& th) { return Vec(drift.b(x) + A(x) * th); };
    auto Htt = [A](const Vec& x, const Vec&) { return A(x); };
    return Hamiltonian(n, std::move(H), std::move(Ht), std::move(Htt), /*h_zero=*/true);
}

Hamiltonian markov_jump_hamiltonian(int dim, JumpProcess process) {
    if (process.rates.size() != process.jumps.size() || process.rates.empty())
        throw ConfigError("markov_jump_hamiltonian: rates and jumps must pair up");
    for (const Vec& e : process.jumps)
        if (e.size() != dim) throw ConfigError("markov_jump_hamiltonian: jump vector dimension mismatch");

    auto p = std::make_shared<JumpProcess>(std::move(process));
    auto H = [p](const Vec& x, const Vec& th) {
        double s = 0.0;
        for (std::size_t i = 0; i < p->rates.size(); ++i)
            s += p->rates[i](x) * (std::exp(p->jumps[i].dot(th)) - 1.0);
        return s;
    };
    auto Ht = [p, dim](const Vec& x, const Vec& th) {
        Vec g = Vec::Zero(dim);
        for (std::size_t i = 0; i < p->rates.size(); ++i)
            g += p->rates[i](x) * std::exp(p->jumps[i].dot(th)) * p->jumps[i];
        return g;
    };
    auto Htt = [p, dim](const Vec& x, const Vec& th) {
        Mat m = Mat::Zero(dim, dim);
        for (std::size_t i = 0; i < p->rates.size(); ++i)
            m += p->rates[i](x) * std::exp(p->jumps[i].dot(th)) * (p->jumps[i] * p->jumps[i].transpose());
        return m;
    };
    return Hamiltonian(dim, std::move(H), std::move(Ht), std::move(Htt), /*h_zero=*/true);
}

Hamiltonian riemannian_hamiltonian(int dim, Hamiltonian::MatrixField A) {
    auto inv = [A](const Vec& x) {
        Eigen::LLT<Mat> llt(A(x));
        if (llt.info() != Eigen::Success) throw MetricError("riemannian metric not positive definite");
        return Mat(llt.solve(Mat::Identity(A(x).rows(), A(x).cols())));
    };
    auto H = [inv](const Vec& x, const Vec& th) { return th.dot(inv(x) * th) - 1.0; };
    auto Ht = [inv](const Vec& x, const Vec& th) { return Vec(2.0 * inv(x) * th); };
    auto Htt = [inv](const Vec& x, const Vec&) { return Mat(2.0 * inv(x)); };
    return Hamiltonian(dim, std::move(H), std::move(Ht), std::move(Htt), /*h_zero=*/false);
}

Hamiltonian agmon_hamiltonian(int dim, std::function<double(const Vec&)> U) {
    auto checked_U = [U](const Vec& x) {
        const double u = U(x);
        if (u < 0.0) throw DomainError("agmon potential is negative at sampled point");
        return u;
    };
    auto H = [checked_U](const Vec& x, const Vec& th) { return 0.5 * th.squaredNorm() - checked_U(x); };
    auto Ht = [](const Vec&, const Vec& th) { return th; };
    auto Htt = [dim](const Vec&, const Vec&) { return Mat(Mat::Identity(dim, dim)); };
    return Hamiltonian(dim, std::move(H), std::move(Ht), std::move(Htt), /*h_zero=*/false);
}

} // namespace minact
