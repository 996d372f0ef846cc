#include "minact/flow_field.hpp"

#include <algorithm>
#include <cmath>

namespace minact {

FlowField::FlowField(int dim, VectorFn b) : dim_(dim), b_(std::move(b)) {
    if (dim_ < 1) throw ConfigError("FlowField dimension must be >= 1");
}

FlowField::FlowField(int dim, VectorFn b, JacobianFn jacobian)
    : dim_(dim), b_(std::move(b)), jac_(std::move(jacobian)) {
    if (dim_ < 1) throw ConfigError("FlowField dimension must be >= 1");
}

Mat FlowField::jacobian(const Vec& x) const {
    if (jac_) return jac_(x);
    Mat J(dim_, dim_);
    for (int j = 0; j < dim_; ++j) {
        Vec xp = x, xm = x;
        xp[j] += h_jac_;
        xm[j] -= h_jac_;
        J.col(j) = (b_(xp) - b_(xm)) / (2.0 * h_jac_);
    }
    return J;
}

const char* to_string(Equilibrium::Kind k) {
    switch (k) {
        case Equilibrium::Kind::Attractor: return "attractor";
        case Equilibrium::Kind::Repellor: return "repellor";
        case Equilibrium::Kind::Saddle: return "saddle";
        default: return "degenerate";
    }
}

std::size_t GridSpec::total() const {
    std::size_t n = 1;
    for (int c : counts) {
        if (c < 1) throw ConfigError("grid counts must be positive");
        n *= static_cast<std::size_t>(c);
    }
    return n;
}

Vec GridSpec::point(const Box& box, std::size_t flat) const {
    if (static_cast<int>(counts.size()) != box.dim()) throw ConfigError("grid/box dimension mismatch");
    Vec x(box.dim());
    for (int d = 0; d < box.dim(); ++d) {
        const std::size_t c = static_cast<std::size_t>(counts[d]);
        const std::size_t i = flat % c;
        flat /= c;
        x[d] = c == 1 ? 0.5 * (box.lo[d] + box.hi[d])
                      : box.lo[d] + (box.hi[d] - box.lo[d]) * static_cast<double>(i) / static_cast<double>(c - 1);
    }
    return x;
}

GridSpec GridSpec::uniform(int dim, int count_per_axis) {
    GridSpec g;
    g.counts.assign(static_cast<std::size_t>(dim), count_per_axis);
    return g;
}

Vec flow(const FlowField& f, const Vec& x, double t, const IntegratorOptions& opts) {
    if (x.size() != f.dim()) throw ConfigError("flow: point dimension mismatch");
    if (t == 0.0) return x;
    return integrate_ode([&f](const Vec& y) { return f.b(y); }, x, t, opts);
}

Equilibrium classify_equilibrium(const FlowField& f, const Vec& location, double tol_lambda) {
    Equilibrium eq;
    eq.location = location;
    Eigen::EigenSolver<Mat> es(f.jacobian(location));
    eq.eigenvalues = es.eigenvalues();

    int neg = 0, pos = 0, zero = 0;
    for (int i = 0; i < eq.eigenvalues.size(); ++i) {
        const double re = eq.eigenvalues[i].real();
        if (re < -tol_lambda) ++neg;
        else if (re > tol_lambda) ++pos;
        else ++zero;
    }
    if (zero > 0) eq.kind = Equilibrium::Kind::Degenerate;
    else if (neg == eq.eigenvalues.size()) eq.kind = Equilibrium::Kind::Attractor;
    else if (pos == eq.eigenvalues.size()) eq.kind = Equilibrium::Kind::Repellor;
    else eq.kind = Equilibrium::Kind::Saddle;
    return eq;
}

std::vector<Equilibrium> find_equilibria(const FlowField& f, const Box& box, const GridSpec& seeds,
                                         const EquilibriumSearchOptions& opts) {
    if (box.dim() != f.dim()) throw ConfigError("find_equilibria: box dimension mismatch");
    const double dedup = opts.tol_dedup * std::max(1.0, box.diameter());

    std::vector<Vec> roots;
    const std::size_t n_seeds = seeds.total();
    for (std::size_t s = 0; s < n_seeds; ++s) {
        Vec x = seeds.point(box, s);
        bool converged = false;
        double res = f.b(x).norm();
        for (int it = 0; it < opts.max_newton_iters; ++it) {
            const Vec bx = f.b(x);
            res = bx.norm();
            if (res < opts.tol_eq) {
                converged = true;
                break;
            }
            const Mat J = f.jacobian(x);
            Eigen::FullPivLU<Mat> lu(J);
            if (!lu.isInvertible()) break;
            Vec dx = lu.solve(-bx);
            // damped update; a seed wandering far outside the box is dropped
            double step = 1.0;
            Vec xn = x + dx;
            for (int h = 0; h < 20 && (!xn.allFinite() || f.b(xn).norm() > res); ++h) {
                step *= 0.5;
                xn = x + step * dx;
            }
            x = xn;
            if (!box.contains(x, box.diameter())) break;
        }
        if (!converged) continue;
        if (!box.contains(x, 1e-9 * std::max(1.0, box.diameter()))) continue;
        bool dup = false;
        for (const Vec& r : roots)
            if ((r - x).norm() < dedup) {
                dup = true;
                break;
            }
        if (!dup) roots.push_back(x);
    }

    std::sort(roots.begin(), roots.end(), [](const Vec& a, const Vec& b) {
        for (int i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    });

    std::vector<Equilibrium> out;
    out.reserve(roots.size());
    for (const Vec& r : roots) out.push_back(classify_equilibrium(f, r, opts.tol_lambda));
    return out;
}

namespace {

// scalar zero inside an accepted step, bisection on the dense output
double bisect_dense(const Dopri5& st, const std::function<double(const Vec&)>& g, double ta, double tb) {
    double ga = g(st.dense(ta));
    for (int i = 0; i < 90; ++i) {
        const double tm = 0.5 * (ta + tb);
        const double gm = g(st.dense(tm));
        if ((ga <= 0.0) == (gm <= 0.0)) {
            ta = tm;
            ga = gm;
        } else {
            tb = tm;
        }
        if (std::abs(tb - ta) < 1e-15 * (1.0 + std::abs(ta))) break;
    }
    return 0.5 * (ta + tb);
}

} // namespace

std::optional<std::pair<double, Vec>> first_flow_crossing(const FlowField& f, const Vec& x,
                                                          const std::function<double(const Vec&)>& g,
                                                          double direction, double t_max,
                                                          const IntegratorOptions& opts) {
    const double t_limit = std::copysign(t_max, direction);
    Dopri5 st([&f](const Vec& y) { return f.b(y); }, opts);
    st.start(x, 0.0, direction);
    double g_prev = g(x);
    if (g_prev == 0.0) return std::make_pair(0.0, x);
    while (st.step_towards(t_limit)) {
        const double g_curr = g(st.x_curr());
        if ((g_prev <= 0.0) != (g_curr <= 0.0)) {
            const double tc = bisect_dense(st, g, st.t_prev(), st.t_curr());
            return std::make_pair(tc, st.dense(tc));
        }
        g_prev = g_curr;
    }
    return std::nullopt;
}

std::optional<double> time_to_reach_ball(const FlowField& f, const Vec& w, const Vec& target, double radius,
                                         double direction, double t_max, const IntegratorOptions& opts) {
    auto g = [&](const Vec& y) { return (y - target).norm() - radius; };
    if (g(w) <= 0.0) return 0.0;
    auto hit = first_flow_crossing(f, w, g, direction, t_max, opts);
    if (!hit) return std::nullopt;
    return hit->first;
}

namespace {

double flowline_distance_impl(const FlowField& f, const Equilibrium& eq, const Vec& w, double direction,
                              const FlowlineDistanceOptions& opts) {
    if (w.size() != f.dim()) throw ConfigError("flowline distance: dimension mismatch");
    const double r_loc = opts.r_loc * opts.scale;
    if ((w - eq.location).norm() <= r_loc) return (w - eq.location).norm();

    const int n = f.dim();
    // augmented state (x, s) with s' = |b(x)|; time runs forward for the
    // stable distance and reversed for the unstable one
    auto rhs = [&](const Vec& y) {
        Vec x = y.head(n);
        Vec bx = f.b(x);
        Vec out(n + 1);
        out.head(n) = direction * bx;
        out[n] = bx.norm();
        return out;
    };
    auto gap = [&](const Vec& y) { return (y.head(n) - eq.location).norm() - r_loc; };

    Vec y0(n + 1);
    y0.head(n) = w;
    y0[n] = 0.0;

    Dopri5 st(rhs, opts.integrator);
    st.start(y0, 0.0, +1.0);
    try {
        while (st.step_towards(opts.t_max)) {
            if (opts.basin_box && !opts.basin_box->contains(st.x_curr().head(n)))
                throw NotInBasinError("flowline left the basin box before approaching the equilibrium");
            if (gap(st.x_curr()) <= 0.0) {
                const double tc = bisect_dense(st, gap, st.t_prev(), st.t_curr());
                const Vec yc = st.dense(tc);
                // linearized tail: remaining arclength estimated by the gap,
                // error O(r_loc^2); keeps f_s(w) >= |w - eq| exactly
                return yc[n] + (yc.head(n) - eq.location).norm();
            }
        }
    } catch (const DivergenceError&) {
        throw NotInBasinError("flowline diverged before approaching the equilibrium");
    }
    throw NotInBasinError("flowline did not approach the equilibrium within t_max");
}

} // namespace

double stable_distance(const FlowField& f, const Equilibrium& eq, const Vec& w,
                       const FlowlineDistanceOptions& opts) {
    if (eq.kind != Equilibrium::Kind::Attractor)
        throw ConfigError("stable_distance requires an attractor");
    return flowline_distance_impl(f, eq, w, +1.0, opts);
}

double unstable_distance(const FlowField& f, const Equilibrium& eq, const Vec& w,
                         const FlowlineDistanceOptions& opts) {
    if (eq.kind != Equilibrium::Kind::Repellor)
        throw ConfigError("unstable_distance requires a repellor");
    return flowline_distance_impl(f, eq, w, -1.0, opts);
}

Curve flowline_curve(const FlowField& f, const Vec& x0, double direction, double arc_budget,
                     const ManifoldTraceOptions& opts) {
    std::vector<Vec> nodes{x0};
    double arc = 0.0;

    IntegratorOptions iopts = opts.integrator;
    Dopri5 st([&f](const Vec& y) { return f.b(y); }, iopts);
    st.start(x0, 0.0, direction);
    const double ds_target = arc_budget / 512.0;
    const double t_limit = std::copysign(opts.t_max, direction);

    while (arc < arc_budget && nodes.size() < opts.max_nodes) {
        if (!st.step_towards(t_limit)) break;
        // split the accepted step so polyline chords stay near ds_target
        const double step_len = (st.x_curr() - st.x_prev()).norm();
        const int pieces = std::max(1, static_cast<int>(std::ceil(step_len / ds_target)));
        for (int p = 1; p <= pieces && arc < arc_budget; ++p) {
            const double t = st.t_prev() + (st.t_curr() - st.t_prev()) * p / pieces;
            Vec x = (p == pieces) ? st.x_curr() : st.dense(t);
            const double ds = (x - nodes.back()).norm();
            if (arc + ds >= arc_budget) {
                const double w = (arc_budget - arc) / ds;
                nodes.push_back(nodes.back() + w * (x - nodes.back()));
                arc = arc_budget;
            } else {
                arc += ds;
                nodes.push_back(std::move(x));
            }
        }
    }
    if (nodes.size() < 2) throw Error("flowline trace produced no progress");
    return Curve(std::move(nodes));
}

Curve orbit_curve(const FlowField& f, const Vec& x0, double T, std::size_t n_nodes,
                  const IntegratorOptions& opts) {
    if (n_nodes < 2) throw ConfigError("orbit_curve: need at least 2 nodes");
    if (T == 0.0) throw ConfigError("orbit_curve: need a nonzero time window");
    std::vector<Vec> nodes;
    nodes.reserve(n_nodes);
    nodes.push_back(x0);

    Dopri5 st([&f](const Vec& y) { return f.b(y); }, opts);
    st.start(x0, 0.0, T);
    std::size_t next = 1;
    while (next < n_nodes && st.step_towards(T)) {
        while (next < n_nodes) {
            const double t_sample = T * static_cast<double>(next) / static_cast<double>(n_nodes - 1);
            const bool inside = T > 0 ? (t_sample <= st.t_curr()) : (t_sample >= st.t_curr());
            if (!inside) break;
            nodes.push_back(st.dense(t_sample));
            ++next;
        }
    }
    while (nodes.size() < n_nodes) nodes.push_back(st.x_curr());
    return Curve(std::move(nodes));
}

InvariantManifolds2d trace_invariant_manifolds_2d(const FlowField& f, const Equilibrium& saddle,
                                                  double arc_budget, const ManifoldTraceOptions& opts) {
    if (f.dim() != 2) throw ConfigError("invariant manifold tracing implemented for dim 2 only");
    if (saddle.kind != Equilibrium::Kind::Saddle) throw ConfigError("trace requires a saddle equilibrium");

    const Mat J = f.jacobian(saddle.location);
    Eigen::EigenSolver<Mat> es(J);
    const auto evals = es.eigenvalues();
    if (std::abs(evals[0].imag()) > 1e-10 || std::abs(evals[1].imag()) > 1e-10)
        throw DegenerateSaddleError("saddle eigenvalues are not real");
    int iu = evals[0].real() > 0 ? 0 : 1;
    int is = 1 - iu;
    if (!(evals[iu].real() > 0.0 && evals[is].real() < 0.0))
        throw DegenerateSaddleError("saddle eigenvalues do not have opposite signs");

    Vec vu = es.eigenvectors().col(iu).real();
    Vec vs = es.eigenvectors().col(is).real();
    if (vu.norm() < 1e-12 || vs.norm() < 1e-12)
        throw DegenerateSaddleError("degenerate saddle eigenvectors");
    vu.normalize();
    vs.normalize();

    const double delta = opts.seed_offset * opts.scale;
    InvariantManifolds2d out;
    out.unstable_plus = flowline_curve(f, saddle.location + delta * vu, +1.0, arc_budget, opts);
    out.unstable_minus = flowline_curve(f, saddle.location - delta * vu, +1.0, arc_budget, opts);
    out.stable_plus = flowline_curve(f, saddle.location + delta * vs, -1.0, arc_budget, opts);
    out.stable_minus = flowline_curve(f, saddle.location - delta * vs, -1.0, arc_budget, opts);
    return out;
}

LimitCycleReport detect_limit_cycle(const FlowField& f, const Vec& seed, double t_max,
                                    const LimitCycleOptions& opts) {
    if (f.dim() != 2) throw ConfigError("limit cycle detection implemented for dim 2 only");
    LimitCycleReport rep;

    try {
        // burn-in toward the attracting set
        const double t_burn = opts.burn_in_fraction * t_max;
        Vec p0 = flow(f, seed, t_burn, opts.integrator);
        const Vec bp = f.b(p0);
        if (bp.norm() < 1e-8) return rep;  // converged to an equilibrium
        const Vec normal = bp / bp.norm();
        auto section = [&](const Vec& y) { return normal.dot(y - p0); };

        // successive positive-direction returns to the section
        Dopri5 st([&f](const Vec& y) { return f.b(y); }, opts.integrator);
        st.start(p0, 0.0, +1.0);
        double g_prev = 0.0;
        bool have_prev_cross = false;
        double t_prev_cross = 0.0;
        Vec x_prev_cross;
        double diameter = 0.0;

        while (st.step_towards(t_max - t_burn)) {
            diameter = std::max(diameter, (st.x_curr() - p0).norm());
            const double g_curr = section(st.x_curr());
            if (g_prev < 0.0 && g_curr >= 0.0 && st.t_curr() > 1e-12) {
                double ta = st.t_prev(), tb = st.t_curr(), ga = section(st.dense(ta));
                for (int i = 0; i < 80; ++i) {
                    const double tm = 0.5 * (ta + tb);
                    const double gm = section(st.dense(tm));
                    if ((ga < 0.0) == (gm < 0.0)) ta = tm, ga = gm;
                    else tb = tm;
                }
                const double tc = 0.5 * (ta + tb);
                const Vec xc = st.dense(tc);
                if (have_prev_cross) {
                    const double period = tc - t_prev_cross;
                    if ((xc - x_prev_cross).norm() < 0.5 * opts.tol_cycle && diameter >= opts.min_diameter) {
                        const Vec ret = flow(f, xc, period, opts.integrator);
                        const double res = (ret - xc).norm();
                        if (res < opts.tol_cycle && f.b(xc).norm() > 1e-8) {
                            rep.found = true;
                            rep.sample_point = xc;
                            rep.period = period;
                            rep.residual = res;
                            return rep;
                        }
                    }
                    diameter = 0.0;  // measure per loop
                }
                have_prev_cross = true;
                t_prev_cross = tc;
                x_prev_cross = xc;
            }
            g_prev = g_curr;
        }
    } catch (const DivergenceError&) {
        // orbit escaped; no cycle along this trajectory
    }
    return rep;
}

} // namespace minact
