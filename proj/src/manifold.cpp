#include "minact/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace minact {

AdmissibleManifold::AdmissibleManifold(int dim, LevelFn f, Box bounding_box)
    : dim_(dim), f_(std::move(f)), box_(std::move(bounding_box)) {
    if (box_.dim() != dim_) throw ConfigError("manifold bounding box dimension mismatch");
}

AdmissibleManifold::AdmissibleManifold(int dim, LevelFn f, GradFn grad, Box bounding_box)
    : dim_(dim), f_(std::move(f)), grad_(std::move(grad)), box_(std::move(bounding_box)) {
    if (box_.dim() != dim_) throw ConfigError("manifold bounding box dimension mismatch");
}

Vec AdmissibleManifold::gradient(const Vec& x) const {
    if (grad_) return orientation_ * grad_(x);
    Vec g(dim_);
    for (int i = 0; i < dim_; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h_grad_;
        xm[i] -= h_grad_;
        g[i] = (f_(xp) - f_(xm)) / (2.0 * h_grad_);
    }
    return orientation_ * g;
}

void AdmissibleManifold::set_orientation(double s) {
    if (s != 1.0 && s != -1.0) throw ConfigError("orientation must be +1 or -1");
    orientation_ = s;
}

namespace {

// zero of the level function on the segment [a, b]; sign-agnostic, so the
// stored orientation does not matter here
Vec bisect_segment(const AdmissibleManifold& m, Vec a, Vec b) {
    double fa = m.level(a);
    for (int i = 0; i < 200; ++i) {
        const Vec mid = 0.5 * (a + b);
        const double fm = m.level(mid);
        if ((fa <= 0.0) == (fm <= 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if ((b - a).norm() < 1e-15 * (1.0 + a.norm())) break;
    }
    return 0.5 * (a + b);
}

} // namespace

AdmissibilityReport check_admissible(AdmissibleManifold& m, const FlowField& f, std::size_t samples,
                                     const AdmissibilityOptions& opts) {
    if (f.dim() != m.dim()) throw ConfigError("check_admissible: dimension mismatch");
    if (samples < 1) throw ConfigError("check_admissible: needs at least one sample");
    const Box& box = m.bounding_box();

    AdmissibilityReport rep;

    // zero-set points by bisection along random segments
    Rng rng(opts.seed);
    const std::size_t budget = samples * 64;
    for (std::size_t tries = 0; tries < budget && rep.zero_points.size() < samples; ++tries) {
        const Vec a = rng.point_in_box(box);
        const Vec b = rng.point_in_box(box);
        if ((m.level(a) <= 0.0) == (m.level(b) <= 0.0)) continue;
        rep.zero_points.push_back(bisect_segment(m, a, b));
    }
    if (rep.zero_points.empty())
        throw EmptyManifoldError("no zero-set point of the manifold found inside its bounding box");

    // the zero set must not touch the box boundary: on a connected boundary
    // a sign change would put a zero on it
    double boundary_sign = 0.0;
    for (int face = 0; face < 2 * m.dim() && rep.zero_set_contained; ++face) {
        const int axis = face / 2;
        const double coord = (face % 2 == 0) ? box.lo[axis] : box.hi[axis];
        const int n_bd = m.dim() == 1 ? 1 : opts.boundary_samples;
        for (int s = 0; s < n_bd; ++s) {
            Vec x = m.dim() == 1 ? Vec::Constant(1, coord) : halton_in_box(static_cast<std::uint64_t>(s), box);
            x[axis] = coord;
            const double v = m.level(x);
            if (v == 0.0) {
                rep.zero_set_contained = false;
                break;
            }
            const double sgn = v > 0.0 ? 1.0 : -1.0;
            if (boundary_sign == 0.0) boundary_sign = sgn;
            else if (sgn != boundary_sign && m.dim() > 1) {
                rep.zero_set_contained = false;
                break;
            }
        }
    }

    // alignment of the drift with the oriented normal at each sampled point
    rep.alignments.reserve(rep.zero_points.size());
    std::size_t n_pos = 0, n_neg = 0;
    std::size_t first_pos = 0, first_neg = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.zero_points.size(); ++i) {
        const Vec& z = rep.zero_points[i];
        const Vec g = m.gradient(z);
        const Vec b = f.b(z);
        const double denom = g.norm() * b.norm();
        const double align = denom > 0.0 ? g.dot(b) / denom : 0.0;
        rep.alignments.push_back(align);
        worst = std::min(worst, std::abs(align));
        if (align > opts.tol_angle) {
            if (n_pos++ == 0) first_pos = i;
        } else if (align < -opts.tol_angle) {
            if (n_neg++ == 0) first_neg = i;
        }
    }
    rep.points_checked = rep.zero_points.size();

    if (n_pos > 0 && n_neg > 0) {
        rep.sign_flip_pair = std::make_pair(first_pos, first_neg);
        rep.min_alignment = -1.0;
        rep.failure = "flow crosses the zero set in both directions";
        rep.pass = false;
        rep.orientation = m.orientation();
        return rep;
    }
    if (n_pos + n_neg < rep.zero_points.size()) {
        rep.failure = "vanishing gradient or drift at a sampled zero-set point";
        rep.pass = false;
        rep.orientation = m.orientation();
        rep.min_alignment = 0.0;
        return rep;
    }

    // uniform crossing direction; flip the orientation if it is negative
    if (n_neg == rep.zero_points.size()) {
        m.set_orientation(-m.orientation());
        for (double& a : rep.alignments) a = -a;
    }
    rep.orientation = m.orientation();
    rep.min_alignment = *std::min_element(rep.alignments.begin(), rep.alignments.end());

    if (!rep.zero_set_contained) {
        rep.failure = "zero set reaches the bounding box boundary";
        rep.pass = false;
        return rep;
    }
    rep.pass = true;
    return rep;
}

double clamp_to(double q1, double q2, double a) {
    if (!(q1 < q2)) throw ConfigError("clamp_to: requires q1 < q2");
    return std::min(std::max(a, q1), q2);
}

namespace {

// crossing search that gives up once arc_cap of flowline length has been
// traced without reaching the manifold; values beyond the cap are clamped by
// the tracing function anyway
std::optional<FlowCoordinates> capped_flow_coordinates(const AdmissibleManifold& m, const FlowField& f,
                                                       const Vec& x, double arc_cap,
                                                       const FlowCoordinateOptions& opts,
                                                       bool* arc_exceeded) {
    if (arc_exceeded) *arc_exceeded = false;
    const int n = f.dim();
    const double fx = m.level(x);
    if (fx == 0.0) return FlowCoordinates{x, 0.0, 0.0};
    const double direction = fx > 0.0 ? -1.0 : +1.0;

    auto rhs = [&f, n](const Vec& y) {
        Vec out(n + 1);
        const Vec b = f.b(y.head(n));
        out.head(n) = b;
        out[n] = b.norm();
        return out;
    };
    auto g = [&m, n](const Vec& y) { return m.level(y.head(n)); };

    Vec y0(n + 1);
    y0.head(n) = x;
    y0[n] = 0.0;
    Dopri5 st(rhs, opts.integrator);
    st.start(y0, 0.0, direction);
    const double t_limit = std::copysign(opts.t_max, direction);
    double g_prev = fx;
    while (true) {
        try {
            if (!st.step_towards(t_limit)) return std::nullopt;
        } catch (const DivergenceError&) {
            return std::nullopt;
        }
        const double g_curr = g(st.x_curr());
        if ((g_prev <= 0.0) != (g_curr <= 0.0)) {
            double ta = st.t_prev(), tb = st.t_curr();
            double ga = g(st.dense(ta));
            for (int i = 0; i < 90; ++i) {
                const double tm = 0.5 * (ta + tb);
                const double gm = g(st.dense(tm));
                if ((ga <= 0.0) == (gm <= 0.0)) ta = tm, ga = gm;
                else tb = tm;
            }
            double tau = 0.5 * (ta + tb);
            Vec yc = st.dense(tau);
            for (int it = 0; it < 12 && std::abs(m.level(yc.head(n))) > opts.level_tol; ++it) {
                const Vec z = yc.head(n);
                const double denom = m.gradient(z).dot(f.b(z));
                if (denom == 0.0) break;
                const double dt = -m.level(z) / denom;
                const Vec zp = integrate_ode([&f](const Vec& q) { return f.b(q); }, z, dt, opts.integrator);
                yc[n] += std::copysign((zp - z).norm(), dt);
                yc.head(n) = zp;
                tau += dt;
            }
            return FlowCoordinates{yc.head(n), -tau, std::abs(yc[n])};
        }
        if (std::abs(st.x_curr()[n]) > arc_cap) {
            if (arc_exceeded) *arc_exceeded = true;
            return std::nullopt;
        }
        g_prev = g_curr;
    }
}

} // namespace

FlowCoordinates flow_coordinates(const AdmissibleManifold& m, const FlowField& f, const Vec& x,
                                 const FlowCoordinateOptions& opts) {
    if (x.size() != f.dim()) throw ConfigError("flow_coordinates: dimension mismatch");
    const auto fc =
        capped_flow_coordinates(m, f, x, std::numeric_limits<double>::infinity(), opts, nullptr);
    if (!fc) throw NotReachableError("no manifold crossing within the time budget");
    return *fc;
}

namespace {

struct SampledConstants {
    double grad_bound;
    double min_drift;
};

// sampled sup |grad f| over E and min |b| over the sampled closure of E
SampledConstants estimate_constants(const std::function<double(const Vec&, bool*)>& eval, double q1,
                                    double q2, const FlowField& field, const Box& box,
                                    const TracingFunction::SamplingOptions& opts) {
    SampledConstants out{0.0, std::numeric_limits<double>::infinity()};
    const int n = box.dim();
    const double h = opts.fd_step * std::max(1.0, box.diameter());
    const double margin = 2.0 * h;
    std::size_t used = 0;
    for (std::size_t i = 0; i < opts.samples; ++i) {
        const Vec x = halton_in_box(i, box);
        bool outside = false;
        const double v = eval(x, &outside);
        if (outside || v <= q1 || v >= q2) continue;
        ++used;
        out.min_drift = std::min(out.min_drift, field.b(x).norm());
        if (v <= q1 + margin || v >= q2 - margin) continue;  // keep FD stencil inside E
        double g2 = 0.0;
        for (int d = 0; d < n; ++d) {
            Vec xp = x, xm = x;
            xp[d] += h;
            xm[d] -= h;
            const double df = (eval(xp, nullptr) - eval(xm, nullptr)) / (2.0 * h);
            g2 += df * df;
        }
        out.grad_bound = std::max(out.grad_bound, std::sqrt(g2));
    }
    if (used == 0)
        throw ConfigError("tracing function: no quasi-random sample hit the traced region E; "
                          "shrink eps or enlarge the sampling box");
    return out;
}

} // namespace

TracingFunction TracingFunction::from_manifold(const AdmissibleManifold& m, const FlowField& f, double eps,
                                               const SamplingOptions& opts) {
    if (!(eps > 0.0)) throw ConfigError("tracing_from_manifold: eps must be positive");
    auto mp = std::make_shared<const AdmissibleManifold>(m);
    auto fp = std::make_shared<const FlowField>(f);
    const FlowCoordinateOptions fopts = opts.flow;

    TracingFunction t;
    t.dim_ = m.dim();
    t.q1_ = -eps;
    t.q2_ = eps;
    t.kind_ = "manifold";
    t.eval_ = [mp, fp, eps, fopts](const Vec& x, bool* outside) -> double {
        if (outside) *outside = false;
        const double level = mp->level(x);
        bool arc_exceeded = false;
        const auto fc = capped_flow_coordinates(*mp, *fp, x, 2.5 * eps, fopts, &arc_exceeded);
        if (fc) {
            const double g = (fc->t >= 0.0 ? 1.0 : -1.0) * fc->arclength;
            return clamp_to(-2.0 * eps, 2.0 * eps, g);
        }
        // beyond the clamp radius the sign of the level decides exactly;
        // outside psi(M, R) it is only the approximation of the two sides
        if (!arc_exceeded && outside) *outside = true;
        return level >= 0.0 ? 2.0 * eps : -2.0 * eps;
    };
    const SampledConstants sc = estimate_constants(t.eval_, t.q1_, t.q2_, f, m.bounding_box(), opts);
    t.grad_bound_ = sc.grad_bound;
    t.min_drift_ = sc.min_drift;
    return t;
}

TracingFunction TracingFunction::from_equilibrium(const FlowField& f, const Equilibrium& eq, double eps,
                                                  const Box& sample_box, const FlowlineDistanceOptions& dist,
                                                  const SamplingOptions& opts) {
    if (!(eps > 0.0)) throw ConfigError("tracing_from_equilibrium: eps must be positive");
    if (eq.kind != Equilibrium::Kind::Attractor && eq.kind != Equilibrium::Kind::Repellor)
        throw ConfigError("tracing_from_equilibrium needs an attractor or repellor");
    auto fp = std::make_shared<const FlowField>(f);
    auto ep = std::make_shared<const Equilibrium>(eq);
    const bool stable = eq.kind == Equilibrium::Kind::Attractor;

    TracingFunction t;
    t.dim_ = f.dim();
    t.q1_ = 0.0;
    t.q2_ = eps;
    t.kind_ = "equilibrium";
    t.eval_ = [fp, ep, eps, stable, dist](const Vec& x, bool* outside) -> double {
        if (outside) *outside = false;
        try {
            const double d =
                stable ? stable_distance(*fp, *ep, x, dist) : unstable_distance(*fp, *ep, x, dist);
            return std::min(d, eps);
        } catch (const NotInBasinError&) {
            if (outside) *outside = true;
            return eps;
        }
    };
    const SampledConstants sc = estimate_constants(t.eval_, t.q1_, t.q2_, f, sample_box, opts);
    t.grad_bound_ = sc.grad_bound;
    t.min_drift_ = sc.min_drift;
    return t;
}

TracingFunction TracingFunction::from_function(int dim, std::function<double(const Vec&)> fn, double q1,
                                               double q2, const FlowField& f, const Box& sample_box,
                                               const SamplingOptions& opts) {
    if (!(q1 < q2)) throw ConfigError("tracing function: requires q1 < q2");
    TracingFunction t;
    t.dim_ = dim;
    t.q1_ = q1;
    t.q2_ = q2;
    t.kind_ = "explicit";
    t.eval_ = [fn](const Vec& x, bool* outside) -> double {
        if (outside) *outside = false;
        return fn(x);
    };
    const SampledConstants sc = estimate_constants(t.eval_, q1, q2, f, sample_box, opts);
    t.grad_bound_ = sc.grad_bound;
    t.min_drift_ = sc.min_drift;
    return t;
}

KeyEstimateResult key_estimate_bound(const TracingFunction& t, const LocalAction& a, double A_const,
                                     const Curve& c, double slack) {
    c.validate();
    if (!(t.min_drift() > 0.0)) throw ConfigError("key estimate: sampled min drift G must be positive");
    if (!std::isfinite(t.grad_bound())) throw ConfigError("key estimate: gradient bound H must be finite");

    KeyEstimateResult r;
    std::size_t clamp_hits = 0;
    r.lhs = restricted_length(c, [&](const Vec& x) {
        bool outside = false;
        const double v = t.eval(x, &outside);
        if (outside) ++clamp_hits;
        return v > t.q1() && v < t.q2();
    });
    r.action = geometric_action(a, c);
    const double f_start = t(c.front());
    const double f_end = t(c.back());
    r.delta_term =
        2.0 * std::abs(clamp_to(t.q1(), t.q2(), f_start) - clamp_to(t.q1(), t.q2(), f_end));
    r.rhs = 2.0 * t.grad_bound() * t.grad_bound() / (A_const * t.min_drift()) * r.action + r.delta_term;
    r.slack = slack;
    r.holds = r.lhs <= r.rhs + slack;
    r.clamp_branch_hits = clamp_hits;
    return r;
}

EvolvedManifold evolve_manifold(const AdmissibleManifold& m, const FlowField& f,
                                const std::function<double(const Vec&)>& beta, double T,
                                std::size_t check_samples, const IntegratorOptions& iopts) {
    auto mp = std::make_shared<const AdmissibleManifold>(m);
    auto fp = std::make_shared<const FlowField>(f);
    auto level = [mp, fp, beta, T, iopts](const Vec& x) {
        const Vec pre = integrate_ode(
            [&](const Vec& y) { return Vec(beta(y) * fp->b(y)); }, x, -T, iopts);
        return mp->level(pre);
    };
    AdmissibleManifold evolved(m.dim(), level, m.bounding_box());
    EvolvedManifold out{std::move(evolved), {}};
    out.report = check_admissible(out.manifold, f, check_samples);
    return out;
}

} // namespace minact
