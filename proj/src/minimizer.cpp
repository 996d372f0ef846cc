#include "minact/minimizer.hpp"

#include <algorithm>
#include <cmath>

namespace minact {

EndpointSet EndpointSet::point(Vec p) {
    EndpointSet s;
    s.kind_ = Kind::Point;
    s.dim_ = static_cast<int>(p.size());
    s.anchor_ = std::move(p);
    return s;
}

EndpointSet EndpointSet::sphere(Vec center, double radius) {
    if (!(radius > 0.0)) throw ConfigError("sphere endpoint set needs a positive radius");
    EndpointSet s;
    s.kind_ = Kind::Sphere;
    s.dim_ = static_cast<int>(center.size());
    s.anchor_ = std::move(center);
    s.radius_ = radius;
    return s;
}

EndpointSet EndpointSet::level_set(int dim, std::function<double(const Vec&)> f, Vec inside_point) {
    if (f(inside_point) > 0.0)
        throw ConfigError("level-set endpoint: the reference point must satisfy f <= 0");
    EndpointSet s;
    s.kind_ = Kind::LevelSet;
    s.dim_ = dim;
    s.anchor_ = std::move(inside_point);
    s.level_ = std::move(f);
    return s;
}

Vec EndpointSet::representative() const {
    if (kind_ == Kind::Sphere) {
        Vec r = anchor_;
        r[0] += radius_;
        return r;
    }
    return anchor_;
}

Vec EndpointSet::project(const Vec& x) const {
    switch (kind_) {
        case Kind::Point: return anchor_;
        case Kind::Sphere: {
            const Vec d = x - anchor_;
            const double n = d.norm();
            if (n < 1e-14) {
                Vec r = anchor_;
                r[0] += radius_;
                return r;
            }
            return anchor_ + (radius_ / n) * d;
        }
        case Kind::LevelSet: {
            if (level_(x) <= 0.0) return x;  // already in the (closed) set
            // bisection along the segment toward the interior reference
            Vec lo = anchor_, hi = x;
            for (int i = 0; i < 120; ++i) {
                const Vec mid = 0.5 * (lo + hi);
                if (level_(mid) <= 0.0) lo = mid;
                else hi = mid;
                if ((hi - lo).norm() < 1e-14 * (1.0 + lo.norm())) break;
            }
            return lo;
        }
    }
    return anchor_;
}

void MinimizeProblem::validate() const {
    if (nodes < 16) throw ConfigError("minimize: at least 16 nodes required");
    if (start_set.dim() != action.dim() || end_set.dim() != action.dim())
        throw ConfigError("minimize: endpoint set dimension mismatch");
    if (box.dim() != action.dim()) throw ConfigError("minimize: box dimension mismatch");
    const Vec a = start_set.representative();
    if (start_set.distance(end_set.representative()) == 0.0 && end_set.distance(a) == 0.0)
        throw ConfigError("minimize: start and end sets must be disjoint");
}

Curve seed_curve(const MinimizeProblem& p, const FlowField* field) {
    p.validate();
    const Vec a = p.start_set.representative();
    Vec b = p.end_set.representative();
    // project toward the nearest admissible end point for sphere/level sets
    b = p.end_set.project(a);
    const Vec a2 = p.start_set.project(b);

    std::vector<Vec> waypoints{a2, b};
    if (field) {
        auto eqs = find_equilibria(*field, p.box, GridSpec::uniform(field->dim(), 9));
        const Vec mid = 0.5 * (a2 + b);
        const Equilibrium* best = nullptr;
        double best_d = std::numeric_limits<double>::infinity();
        for (const Equilibrium& e : eqs) {
            if (e.kind != Equilibrium::Kind::Saddle) continue;
            const double d = (e.location - mid).norm();
            if (d < best_d) {
                best_d = d;
                best = &e;
            }
        }
        if (best) waypoints = {a2, best->location, b};
    }

    // polyline through the waypoints; every waypoint is a node, the rest
    // are spread along the legs
    std::vector<Vec> nodes;
    const std::size_t m = std::max<std::size_t>(p.nodes, waypoints.size());
    const std::size_t legs = waypoints.size() - 1;
    const std::size_t per_leg = (m - 1) / legs;
    for (std::size_t s = 0; s < legs; ++s) {
        const std::size_t count = (s == legs - 1) ? (m - 1) - per_leg * (legs - 1) : per_leg;
        for (std::size_t i = 0; i < count; ++i) {
            const double w = static_cast<double>(i) / static_cast<double>(count);
            nodes.push_back(waypoints[s] + w * (waypoints[s + 1] - waypoints[s]));
        }
    }
    nodes.push_back(waypoints.back());
    Curve raw;
    raw.nodes = std::move(nodes);
    return raw;
}

namespace {

double action_of(const LocalAction& a, const std::vector<Vec>& nodes, par::Mode mode) {
    Curve c;
    c.nodes = nodes;
    return geometric_action(a, c, mode);
}

// contribution of the two chords adjacent to node i
double local_terms(const LocalAction& a, const std::vector<Vec>& nodes, std::size_t i, const Vec& xi) {
    double s = 0.0;
    if (i > 0) {
        const Vec mid = 0.5 * (nodes[i - 1] + xi);
        s += a(mid, xi - nodes[i - 1]);
    }
    if (i + 1 < nodes.size()) {
        const Vec mid = 0.5 * (xi + nodes[i + 1]);
        s += a(mid, nodes[i + 1] - xi);
    }
    return s;
}

} // namespace

MinimizeResult minimize(const MinimizeProblem& p, std::optional<Curve> initial, par::Mode mode) {
    p.validate();
    const int n = p.action.dim();
    const double h_g = 1e-6 * p.scale;

    Curve c0 = initial ? std::move(*initial) : seed_curve(p);
    ArcCurve arc = reparameterize_arclength(c0, p.nodes);
    std::vector<Vec> nodes = arc.nodes;
    nodes.front() = p.start_set.project(nodes.front());
    nodes.back() = p.end_set.project(nodes.back());
    for (Vec& x : nodes) x = p.box.clamp(x);

    MinimizeResult res;
    res.seed = p.seed;
    double S = action_of(p.action, nodes, mode);
    res.action_history.push_back(S);

    const std::size_t m = nodes.size();
    std::vector<Vec> grad(m, Vec::Zero(n));
    const std::size_t window = 20;

    std::size_t it = 0;
    for (; it < p.max_iters; ++it) {
      try {
        // finite-difference gradient; every (node, coordinate) entry is
        // independent, only the two adjacent chords are re-evaluated
        const std::size_t entries = m * static_cast<std::size_t>(n);
        std::vector<double> gbuf(entries);
        par::for_each_index(
            entries,
            [&](std::size_t e) {
                const std::size_t i = e / static_cast<std::size_t>(n);
                const int d = static_cast<int>(e % static_cast<std::size_t>(n));
                Vec xp = nodes[i], xm = nodes[i];
                xp[d] += h_g;
                xm[d] -= h_g;
                gbuf[e] = (local_terms(p.action, nodes, i, xp) - local_terms(p.action, nodes, i, xm)) /
                          (2.0 * h_g);
            },
            mode);
        for (std::size_t i = 0; i < m; ++i)
            for (int d = 0; d < n; ++d) grad[i][d] = gbuf[i * static_cast<std::size_t>(n) + d];

        double gmax = 0.0;
        for (const Vec& g : grad) gmax = std::max(gmax, g.norm());
        if (gmax == 0.0) break;

        // backtracking line search on the redistributed candidate
        bool accepted = false;
        double step = p.step0 / gmax;
        for (int half = 0; half < 45 && !accepted; ++half, step *= 0.5) {
            std::vector<Vec> cand(m);
            for (std::size_t i = 0; i < m; ++i) cand[i] = p.box.clamp(nodes[i] - step * grad[i]);
            cand.front() = p.box.clamp(p.start_set.project(cand.front()));
            cand.back() = p.box.clamp(p.end_set.project(cand.back()));
            Curve cc;
            cc.nodes = std::move(cand);
            if (curve_length(cc) <= 0.0) continue;
            ArcCurve redistributed = reparameterize_arclength(cc, p.nodes);
            const double Sc = action_of(p.action, redistributed.nodes, mode);
            if (Sc < S) {
                nodes = std::move(redistributed.nodes);
                S = Sc;
                accepted = true;
            }
        }
        res.action_history.push_back(S);
        if (!accepted) {
            // no step size decreases the action: discrete stationarity at
            // line-search resolution
            res.converged = true;
            ++it;
            break;
        }

        if (res.action_history.size() > window) {
            const double prev = res.action_history[res.action_history.size() - 1 - window];
            if ((prev - S) / std::max(std::abs(S), 1e-300) < p.tol_S) {
                res.converged = true;
                ++it;
                break;
            }
        }
      } catch (const Error& e) {
        throw Error("minimize: action evaluation failed at iteration " + std::to_string(it) + ": " +
                    e.what());
      }
    }
    if (!res.converged && res.action_history.size() > window) {
        const double prev = res.action_history[res.action_history.size() - 1 - window];
        res.converged = (prev - S) / std::max(std::abs(S), 1e-300) < p.tol_S;
    }

    Curve final_curve;
    final_curve.nodes = nodes;
    res.curve = reparameterize_arclength(final_curve, p.nodes);
    res.action_value = action_of(p.action, res.curve.nodes, mode);
    res.iterations = it;
    for (const Vec& x : res.curve.nodes)
        for (int d = 0; d < n; ++d)
            if (x[d] == p.box.lo[d] || x[d] == p.box.hi[d]) res.box_clamp_active = true;
    return res;
}

Curve bend_end_family(const ArcCurve& c, const FlowField& f, double alpha0, double eps) {
    if (c.nodes.size() < 2) throw InvalidCurveError("bend_end_family: need at least 2 nodes");
    if (alpha0 < 0.0 || alpha0 >= 1.0) throw ConfigError("bend_end_family: alpha0 must be in [0,1)");
    const double total = c.total_length();
    if (!(total > 0.0)) throw DegenerateCurveError("bend_end_family: zero-length curve");

    Curve out;
    out.nodes = c.nodes;
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        const double alpha = c.cumulative_length[i] / total;
        if (alpha >= alpha0)
            out.nodes[i] = c.nodes[i] + eps * (alpha - alpha0) * f.b(c.nodes[i]);
    }
    return out;
}

double descent_derivative(const ArcCurve& c, const LocalAction& a, const FlowField& f, double alpha0,
                          double eps) {
    const Vec end = c.nodes.back();
    if (f.b(end).norm() <= 1e-6)
        throw ConfigError("descent_derivative: curve ends at a point with vanishing drift");
    const double Sp = geometric_action(a, bend_end_family(c, f, alpha0, +eps));
    const double Sm = geometric_action(a, bend_end_family(c, f, alpha0, -eps));
    return (Sp - Sm) / (2.0 * eps);
}

HittingReport hitting_report(const MinimizeResult& r, const FlowField& f, const Curve& separatrix,
                             const std::vector<Vec>& crit_points, const LocalAction& action,
                             const HittingOptions& opts) {
    (void)f;
    HittingReport rep;
    rep.total_action = r.action_value;
    const auto& nodes = r.curve.nodes;
    if (nodes.size() < 2) throw InvalidCurveError("hitting_report: degenerate minimizer curve");
    const double mean_chord = r.curve.total_length() / static_cast<double>(nodes.size() - 1);
    const double dist_tol = opts.dist_tol.value_or(std::max(1e-6, 0.75 * mean_chord));

    std::optional<std::size_t> first, last;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (distance_to_polyline(nodes[i], separatrix) <= dist_tol) {
            if (!first) first = i;
            last = i;
        }
    }
    if (!first) return rep;  // no crossing is a report, not an error

    rep.crossed = true;
    rep.first_index = *first;
    rep.last_index = *last;
    rep.first_hit = nodes[*first];
    rep.last_hit = nodes[*last];

    auto nearest_crit = [&](const Vec& x) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec& cp : crit_points) best = std::min(best, (x - cp).norm());
        return best;
    };
    rep.first_dist_to_crit = nearest_crit(rep.first_hit);
    rep.last_dist_to_crit = nearest_crit(rep.last_hit);
    rep.pass = rep.first_dist_to_crit < opts.pass_tol && rep.last_dist_to_crit < opts.pass_tol;

    if (*last + 1 < nodes.size()) {
        Curve tail;
        tail.nodes.assign(nodes.begin() + static_cast<std::ptrdiff_t>(*last), nodes.end());
        rep.downhill_action = geometric_action(action, tail);
    }
    return rep;
}

double winding_number(const Curve& c, const Vec& center) {
    c.validate();
    if (c.dim() != 2) throw ConfigError("winding_number is defined for planar curves");
    double total = 0.0;
    for (std::size_t i = 1; i < c.nodes.size(); ++i) {
        const Vec a = c.nodes[i - 1] - center;
        const Vec b = c.nodes[i] - center;
        total += std::atan2(a[0] * b[1] - a[1] * b[0], a.dot(b));
    }
    return total / (2.0 * M_PI);
}

} // namespace minact
