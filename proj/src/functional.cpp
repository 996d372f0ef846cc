#include "minact/functional.hpp"

#include <cmath>

namespace minact {

double geometric_action(const LocalAction& a, const Curve& c, par::Mode mode) {
    c.validate();
    if (c.dim() != a.dim()) throw ConfigError("geometric_action: curve/action dimension mismatch");
    const std::size_t m = c.nodes.size() - 1;
    return par::sum_terms(
        m,
        [&](std::size_t i) {
            const Vec mid = 0.5 * (c.nodes[i] + c.nodes[i + 1]);
            const Vec dz = c.nodes[i + 1] - c.nodes[i];
            return a(mid, dz);
        },
        mode);
}

double time_action(const Hamiltonian& h, const TimePath& path) {
    if (path.times.size() != path.states.size() || path.times.size() < 2)
        throw ConfigError("time_action: need at least 2 samples with matching timestamps");
    for (std::size_t i = 1; i < path.times.size(); ++i)
        if (!(path.times[i] > path.times[i - 1]))
            throw ConfigError("time_action: timestamps must be strictly increasing");

    const std::size_t m = path.times.size() - 1;
    return par::sum_terms(m, [&](std::size_t i) {
        const double dt = path.times[i + 1] - path.times[i];
        const Vec v = (path.states[i + 1] - path.states[i]) / dt;
        const double L0 = legendre_lagrangian(h, path.states[i], v);
        const double L1 = legendre_lagrangian(h, path.states[i + 1], v);
        return 0.5 * (L0 + L1) * dt;
    });
}

DoubleInfReport compare_double_inf(const Hamiltonian& h, const Curve& c, const std::vector<double>& T_grid,
                                   double tol) {
    if (T_grid.empty()) throw ConfigError("compare_double_inf: empty T grid");
    DoubleInfReport rep;
    rep.tol = tol;
    rep.geometric = geometric_action(LocalAction::hamiltonian(h), c);

    const ArcCurve arc = reparameterize_arclength(c, c.nodes.size());
    rep.min_time_action = std::numeric_limits<double>::infinity();
    for (double T : T_grid) {
        if (!(T > 0.0)) throw ConfigError("compare_double_inf: T values must be positive");
        TimePath p;
        p.states = arc.nodes;
        p.times.resize(arc.nodes.size());
        for (std::size_t i = 0; i < p.times.size(); ++i)
            p.times[i] = T * static_cast<double>(i) / static_cast<double>(p.times.size() - 1);
        const double st = time_action(h, p);
        rep.t_values.push_back(T);
        rep.time_actions.push_back(st);
        if (st < rep.min_time_action) {
            rep.min_time_action = st;
            rep.t_at_min = T;
        }
    }
    rep.geometric_leq_min = rep.geometric <= rep.min_time_action + tol;
    return rep;
}

double action_bound_constant(const LocalAction& a, const Box& K, int directions, int x_samples) {
    if (K.dim() != a.dim()) throw ConfigError("action_bound_constant: box dimension mismatch");
    double max_l = 0.0;
    for (int s = 0; s < x_samples; ++s) {
        const Vec x = halton_in_box(static_cast<std::uint64_t>(s), K);
        if (a.dim() == 2) {
            for (int d = 0; d < directions; ++d) {
                const double phi = 2.0 * M_PI * d / directions;
                Vec y(2);
                y << std::cos(phi), std::sin(phi);
                max_l = std::max(max_l, a(x, y));
            }
        } else {
            Rng rng(0xd1a0u + static_cast<std::uint64_t>(s));
            for (int d = 0; d < directions; ++d) max_l = std::max(max_l, a(x, rng.unit_vector(a.dim())));
        }
    }
    return 1.0 + max_l;
}

double action_upper_bound(const LocalAction& a, const Curve& c, const Box& K, int directions, int x_samples) {
    c.validate();
    for (const Vec& p : c.nodes)
        if (!K.contains(p, 1e-12)) throw DomainError("action_upper_bound: curve exits the box K");
    return action_bound_constant(a, K, directions, x_samples) * curve_length(c);
}

BoundReport drift_lower_bound_check(const LocalAction& a, const FlowField& f, double A_const, const Box& K,
                                    std::size_t samples, std::uint64_t seed, par::Mode mode) {
    if (samples < 1) throw ConfigError("drift_lower_bound_check: needs at least one sample");
    BoundReport rep;
    rep.samples = samples;

    std::vector<Vec> xs(samples), ys(samples);
    Rng rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        xs[i] = rng.point_in_box(K);
        ys[i] = rng.uniform(0.1, 10.0) * rng.unit_vector(f.dim());
    }

    std::vector<double> margins(samples);
    par::for_each_index(
        samples,
        [&](std::size_t i) {
            const Vec b = f.b(xs[i]);
            const double rhs = A_const * (b.norm() * ys[i].norm() - b.dot(ys[i]));
            margins[i] = a(xs[i], ys[i]) - rhs;
        },
        mode);

    rep.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i) {
        if (margins[i] < rep.margin) {
            rep.margin = margins[i];
            rep.worst_x = xs[i];
            rep.worst_y = ys[i];
        }
        if (margins[i] < -1e-9) ++rep.violations;
    }
    rep.value = rep.margin;
    rep.bound = -1e-9;
    return rep;
}

} // namespace minact
