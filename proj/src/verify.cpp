#include "minact/verify.hpp"

#include <cmath>
#include <json.hpp>

namespace minact {

namespace {

const FlowField& scenario_field(const Scenario& sc) {
    if (!sc.field) throw ConfigError("verify: scenario has no [field] section");
    return *sc.field;
}

const LocalAction& scenario_action(const Scenario& sc) {
    if (!sc.action) throw ConfigError("verify: scenario has no [action] section");
    return *sc.action;
}

Box default_box(const Scenario& sc) {
    if (sc.grid) return sc.grid->box;
    if (sc.problem) return sc.problem->box;
    return Box::cube(sc.dim, -2.0, 2.0);
}

Box box_from_param(const Scenario& sc, const std::string& key) {
    const auto xs = sc.verify.numbers(key);
    if (xs.empty()) return default_box(sc);
    if (static_cast<int>(xs.size()) != 2 * sc.dim)
        throw ConfigError("verify: '" + key + "' needs 2*dim numbers");
    Vec lo(sc.dim), hi(sc.dim);
    for (int i = 0; i < sc.dim; ++i) {
        lo[i] = xs[static_cast<std::size_t>(i)];
        hi[i] = xs[static_cast<std::size_t>(sc.dim + i)];
    }
    return Box(lo, hi);
}

double resolve_drift_constant(const Scenario& sc, const Box& box, const std::string& key) {
    if (sc.verify.has(key)) return sc.verify.number(key, 1.0);
    const LocalAction& a = scenario_action(sc);
    if (const Hamiltonian* h = a.hamiltonian_backing())
        return drift_constant(*h, box, GridSpec::uniform(sc.dim, 9));
    return 1.0;  // the SDE geometric action is its own drift bound
}

Curve random_polyline(Rng& rng, const Box& box, std::size_t waypoints, std::size_t nodes) {
    std::vector<Vec> wp;
    for (std::size_t i = 0; i < waypoints; ++i) wp.push_back(rng.point_in_box(box));
    Curve raw;
    raw.nodes = std::move(wp);
    return reparameterize_arclength(raw, nodes).as_curve();
}

Json suite_flowline_zero_cost(const Scenario& sc) {
    const FlowField& f = scenario_field(sc);
    const LocalAction& a = scenario_action(sc);
    const auto pt = sc.verify.numbers("flowline_point");
    if (static_cast<int>(pt.size()) != sc.dim)
        throw ConfigError("verify: flowline_zero_cost needs 'flowline_point'");
    Vec x0(sc.dim);
    for (int i = 0; i < sc.dim; ++i) x0[i] = pt[static_cast<std::size_t>(i)];
    const double len = sc.verify.number("flowline_length", 1.5);
    const double tol = sc.verify.number("tol", 1e-6);

    const Curve fl = flowline_curve(f, x0, +1.0, len);
    const double length = curve_length(fl);
    const double S = geometric_action(a, fl);

    Json j;
    j["flowline_length"] = length;
    j["action"] = S;
    j["tol"] = tol;
    j["pass"] = S < tol && length >= 1.0;
    return j;
}

Json suite_drift_lower_bound(const Scenario& sc) {
    const LocalAction& a = scenario_action(sc);
    const FlowField* drift = a.drift();
    if (!drift) throw ConfigError("verify: drift_lower_bound needs an action with a drift");
    const Box box = box_from_param(sc, "dlb_box");
    const double A_const = resolve_drift_constant(sc, box, "dlb_a_const");
    const std::size_t samples = static_cast<std::size_t>(sc.verify.number("dlb_samples", 10000));

    const BoundReport rep = drift_lower_bound_check(a, *drift, A_const, box, samples, sc.seed);
    Json j = to_json(rep);
    j["a_const"] = A_const;
    j["seed"] = sc.seed;
    j["pass"] = rep.violations == 0;
    return j;
}

Json suite_key_estimate(const Scenario& sc) {
    const FlowField& f = scenario_field(sc);
    const LocalAction& a = scenario_action(sc);
    const std::size_t idx = static_cast<std::size_t>(sc.verify.number("key_manifold", 0));
    if (idx >= sc.manifolds.size()) throw ConfigError("verify: key_manifold index out of range");
    AdmissibleManifold m = sc.manifolds[idx];
    AdmissibilityOptions aopts;
    aopts.seed = sc.seed;
    const AdmissibilityReport arep = check_admissible(m, f, 48, aopts);
    if (!arep.pass)
        throw ConfigError("verify: key_estimate manifold failed admissibility: " + arep.failure);

    const double eps = sc.verify.number("key_eps", 0.3);
    TracingFunction::SamplingOptions sopts;
    sopts.samples = 10000;
    const TracingFunction tf = TracingFunction::from_manifold(m, f, eps, sopts);

    const Box box = box_from_param(sc, "key_box");
    const double A_const = resolve_drift_constant(sc, box, "key_a_const");
    const std::size_t n_curves = static_cast<std::size_t>(sc.verify.number("key_curves", 100));
    const std::size_t n_nodes = static_cast<std::size_t>(sc.verify.number("key_nodes", 400));

    Rng rng(sc.seed ^ 0x6b657965ULL);
    std::size_t held = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    Json worst;
    for (std::size_t k = 0; k < n_curves; ++k) {
        const Curve c = random_polyline(rng, box, 6, n_nodes);
        const double spacing = curve_length(c) / static_cast<double>(n_nodes - 1);
        const KeyEstimateResult r = key_estimate_bound(tf, a, A_const, c, 1e-6 + 2.0 * spacing);
        if (r.holds) ++held;
        const double margin = r.rhs + r.slack - r.lhs;
        if (margin < worst_margin) {
            worst_margin = margin;
            worst = to_json(r);
        }
    }
    Json j;
    j["curves"] = n_curves;
    j["held"] = held;
    j["grad_bound"] = tf.grad_bound();
    j["min_drift"] = tf.min_drift();
    j["a_const"] = A_const;
    j["eps"] = eps;
    j["seed"] = sc.seed;
    j["worst_case"] = worst;
    j["pass"] = held == n_curves;
    return j;
}

Json suite_descent_direction(const Scenario& sc) {
    const FlowField& f = scenario_field(sc);
    const LocalAction& a = scenario_action(sc);
    const Box box = default_box(sc);
    const std::size_t wanted = static_cast<std::size_t>(sc.verify.number("descent_segments", 20));

    Rng rng(sc.seed ^ 0xdecae5ULL);
    std::size_t negative = 0, tested = 0;
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t guard = 0;
    while (tested < wanted && ++guard < wanted * 200) {
        const Vec p = rng.point_in_box(box);
        const Vec q = rng.point_in_box(box);
        if ((q - p).norm() < 0.1) continue;
        const Vec bq = f.b(q);
        if (bq.norm() < 0.2) continue;  // end must be well away from critical points
        // reject near-flowline segments: shearing toward the drift only lowers
        // the action when the tail is not already a flowline
        const Vec dir = (q - p).normalized();
        if (dir.dot(bq.normalized()) > 0.9) continue;
        Curve seg;
        seg.nodes = {p, q};
        const ArcCurve arc = reparameterize_arclength(seg, 64);
        const double d = descent_derivative(arc, a, f, 0.0);
        ++tested;
        if (d < 0.0) ++negative;
        worst = std::max(worst, d);
    }
    Json j;
    j["segments"] = tested;
    j["negative"] = negative;
    j["worst_derivative"] = worst;
    j["seed"] = sc.seed;
    j["pass"] = tested == wanted && negative == tested;
    return j;
}

Json suite_hitting_report(const Scenario& sc) {
    const FlowField& f = scenario_field(sc);
    if (sc.dim != 2) throw ConfigError("verify: hitting_report needs a 2-D scenario");
    MinimizeProblem p = sc.make_problem();
    const MinimizeResult res = minimize(p);

    const auto eqs = find_equilibria(f, p.box, GridSpec::uniform(2, 11));
    const Equilibrium* saddle = nullptr;
    for (const auto& e : eqs)
        if (e.kind == Equilibrium::Kind::Saddle) saddle = &e;
    if (!saddle) throw ConfigError("verify: hitting_report found no saddle in the problem box");

    const InvariantManifolds2d inv = trace_invariant_manifolds_2d(f, *saddle, 4.0);
    const Curve separatrix = concat(reverse(inv.stable_plus), inv.stable_minus, 1e-3);

    std::vector<Vec> crit;
    for (const auto& e : eqs) crit.push_back(e.location);
    HittingOptions hopts;
    hopts.pass_tol = sc.verify.number("pass_tol", 0.05);
    const HittingReport rep = hitting_report(res, f, separatrix, crit, p.action, hopts);

    Json j;
    j["action"] = res.action_value;
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    j["crossed"] = rep.crossed;
    j["seed"] = sc.seed;
    j["pass_tol"] = hopts.pass_tol;
    if (rep.crossed) {
        j["first_hit"] = to_json(rep.first_hit);
        j["last_hit"] = to_json(rep.last_hit);
        j["first_dist_to_crit"] = rep.first_dist_to_crit;
        j["last_dist_to_crit"] = rep.last_dist_to_crit;
        j["downhill_action"] = rep.downhill_action;
    }
    j["pass"] = rep.crossed && rep.pass;
    return j;
}

Json suite_admissibility(const Scenario& sc) {
    const FlowField& f = scenario_field(sc);
    const std::size_t samples = static_cast<std::size_t>(sc.verify.number("admissibility_samples", 64));
    auto expectations = sc.verify.numbers("expect_admissible");

    Json results = Json::array();
    bool pass = true;
    for (std::size_t i = 0; i < sc.manifolds.size(); ++i) {
        AdmissibleManifold m = sc.manifolds[i];
        AdmissibilityOptions aopts;
        aopts.seed = sc.seed + i;
        const AdmissibilityReport rep = check_admissible(m, f, samples, aopts);
        const bool expected = expectations.empty() || i >= expectations.size()
                                  ? true
                                  : expectations[i] != 0.0;
        Json r;
        r["manifold"] = sc.manifold_names[i];
        r["admissible"] = rep.pass;
        r["expected_admissible"] = expected;
        r["orientation"] = rep.orientation;
        r["min_alignment"] = rep.min_alignment;
        if (!rep.pass) r["failure"] = rep.failure;
        if (rep.sign_flip_pair) {
            const auto [ip, in] = *rep.sign_flip_pair;
            Json cert;
            cert["point_out"] = to_json(rep.zero_points[ip]);
            cert["alignment_out"] = rep.alignments[ip];
            cert["point_in"] = to_json(rep.zero_points[in]);
            cert["alignment_in"] = rep.alignments[in];
            r["sign_flip_pair"] = cert;
        }
        if (rep.pass != expected) pass = false;
        results.push_back(std::move(r));
    }
    Json j;
    j["manifolds"] = results;
    j["samples"] = samples;
    j["seed"] = sc.seed;
    j["pass"] = pass;
    return j;
}

} // namespace

VerifyOutcome run_verify(const Scenario& sc) {
    VerifyOutcome out;
    out.report["scenario"] = sc.name;
    out.report["seed"] = sc.seed;
    Json suites = Json::object();

    bool all_pass = true;
    std::vector<std::string> names = sc.verify.suites;
    if (names.empty())
        throw ConfigError("verify: scenario lists no suites ([verify] section, key 'suites')");

    for (const std::string& name : names) {
        Json r;
        if (name == "flowline_zero_cost") r = suite_flowline_zero_cost(sc);
        else if (name == "drift_lower_bound") r = suite_drift_lower_bound(sc);
        else if (name == "key_estimate") r = suite_key_estimate(sc);
        else if (name == "descent_direction") r = suite_descent_direction(sc);
        else if (name == "hitting_report") r = suite_hitting_report(sc);
        else if (name == "admissibility") r = suite_admissibility(sc);
        else throw ConfigError("verify: unknown suite '" + name + "'");
        all_pass = all_pass && r.at("pass").get<bool>();
        suites[name] = std::move(r);
    }
    out.report["suites"] = std::move(suites);
    out.report["pass"] = all_pass;
    out.pass = all_pass;
    return out;
}

} // namespace minact
