#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "minact/manifold.hpp"
#include "minact/scenario.hpp"

using namespace minact;

namespace {

Vec pt(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

FlowField radial_field() {
    return FlowField(
        2, [](const Vec& x) { return Vec(-x); },
        [](const Vec&) { return Mat(-Mat::Identity(2, 2)); });
}

FlowField constant_field(double bx, double by) {
    Vec b0 = pt(bx, by);
    return FlowField(2, [b0](const Vec&) { return b0; });
}

AdmissibleManifold unit_sphere_manifold() {
    return AdmissibleManifold(
        2, [](const Vec& x) { return x.squaredNorm() - 1.0; },
        [](const Vec& x) { return Vec(2.0 * x); }, Box::cube(2, -1.6, 1.6));
}

} // namespace

TEST_CASE("potential level sets of the double well are admissible") {
    const FlowField f = make_field("double_well", {}, 2);
    const auto V = make_potential("double_well", 2);
    AdmissibleManifold m(2, [V](const Vec& x) { return 0.1 - V(x); }, Box::cube(2, -2, 2));
    const AdmissibilityReport rep = check_admissible(m, f, 64);
    CHECK(rep.pass);
    CHECK(rep.min_alignment > 1e-6);
    CHECK(rep.zero_set_contained);
}

TEST_CASE("sphere around the radial attractor passes with flipped orientation") {
    const FlowField f = radial_field();
    AdmissibleManifold m(
        2, [](const Vec& x) { return x.squaredNorm() - 0.25; },
        [](const Vec& x) { return Vec(2.0 * x); }, Box::cube(2, -0.9, 0.9));
    const AdmissibilityReport rep = check_admissible(m, f, 48);
    CHECK(rep.pass);
    CHECK(rep.orientation == -1.0);  // inward flow crosses |x|^2 - 0.25 downward
    CHECK(rep.min_alignment > 0.9);  // radial crossing is orthogonal
}

TEST_CASE("loops crossing the limit cycle fail with a sign-flip certificate") {
    const FlowField f = make_field("limit_cycle", {}, 2);
    Rng rng(1123);
    for (int trial = 0; trial < 10; ++trial) {
        // random circle transversally crossing the unit cycle
        Vec c = 0.4 * rng.unit_vector(2) * rng.unit();
        const double lo = 1.0 - c.norm() + 0.05;
        const double hi = 1.0 + c.norm() - 0.05;
        const double r = hi > lo ? rng.uniform(lo, hi) : 1.0;
        AdmissibleManifold m(
            2, [c, r](const Vec& x) { return (x - c).squaredNorm() - r * r; },
            [c](const Vec& x) { return Vec(2.0 * (x - c)); }, Box::cube(2, -2.2, 2.2));
        AdmissibilityOptions opts;
        opts.seed = 100 + static_cast<std::uint64_t>(trial);
        const AdmissibilityReport rep = check_admissible(m, f, 64, opts);
        CHECK_FALSE(rep.pass);
        REQUIRE(rep.sign_flip_pair.has_value());
        const auto [ip, in] = *rep.sign_flip_pair;
        CHECK(rep.alignments[ip] * rep.alignments[in] < 0.0);
    }
}

TEST_CASE("an empty zero set raises the dedicated error") {
    const FlowField f = radial_field();
    AdmissibleManifold m(2, [](const Vec& x) { return x.squaredNorm() + 1.0; }, Box::cube(2, -1, 1));
    CHECK_THROWS_AS(check_admissible(m, f, 16), EmptyManifoldError);
}

TEST_CASE("flow coordinates of the unit-speed translation") {
    const FlowField f = constant_field(1, 0);
    AdmissibleManifold plane(
        2, [](const Vec& x) { return x[0]; }, [](const Vec&) { return pt(1, 0); },
        Box::cube(2, -2, 2));
    const FlowCoordinates fc = flow_coordinates(plane, f, pt(0.7, 0.3));
    CHECK((fc.z - pt(0, 0.3)).norm() < 1e-10);
    CHECK(fc.t == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(fc.arclength == doctest::Approx(0.7).epsilon(1e-10));

    // a point already on the manifold
    const FlowCoordinates on = flow_coordinates(plane, f, pt(0, -0.4));
    CHECK(on.t == 0.0);
    CHECK((on.z - pt(0, -0.4)).norm() == 0.0);
}

TEST_CASE("flow coordinates of the radial field with the exponential oracle") {
    const FlowField f = radial_field();
    AdmissibleManifold m = unit_sphere_manifold();
    check_admissible(m, f, 32);  // fixes the orientation
    const Vec x = pt(std::exp(-1.0), 0.0);
    const FlowCoordinates fc = flow_coordinates(m, f, x);
    CHECK((fc.z - pt(1, 0)).norm() < 1e-9);
    CHECK(fc.t == doctest::Approx(1.0).epsilon(1e-9));
    // round trip
    CHECK((flow(f, fc.z, fc.t) - x).norm() < 1e-9);
    // arclength along the ray is the difference of radii
    CHECK(fc.arclength == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("flow coordinates fail beyond the time budget") {
    const FlowField f = constant_field(1, 0);
    AdmissibleManifold plane(
        2, [](const Vec& x) { return x[0]; }, [](const Vec&) { return pt(1, 0); },
        Box::cube(2, -2, 2));
    FlowCoordinateOptions opts;
    opts.t_max = 0.5;
    CHECK_THROWS_AS(flow_coordinates(plane, f, pt(0.9, 0), opts), NotReachableError);
}

TEST_CASE("clamp helper") {
    CHECK(clamp_to(0, 1, 1.7) == 1.0);
    CHECK(clamp_to(0, 1, -0.3) == 0.0);
    CHECK(clamp_to(0, 1, 0.4) == 0.4);
    CHECK_THROWS_AS(clamp_to(1, 0, 0.5), ConfigError);
}

TEST_CASE("tracing from the hyperplane is the exact coordinate") {
    const FlowField f = constant_field(1, 0);
    AdmissibleManifold plane(
        2, [](const Vec& x) { return x[0]; }, [](const Vec&) { return pt(1, 0); },
        Box::cube(2, -1, 1));
    TracingSamplingOptions sopts;
    sopts.samples = 1500;
    const TracingFunction t = TracingFunction::from_manifold(plane, f, 0.5, sopts);

    CHECK(t(pt(0.3, 0.2)) == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(t(pt(-0.4, -0.8)) == doctest::Approx(-0.4).epsilon(1e-9));
    CHECK(t(pt(0.99, 0.0)) == doctest::Approx(0.99).epsilon(1e-9));
    CHECK(std::abs(t(pt(0, 0.5))) < 1e-10);  // vanishes on the manifold
    CHECK(t.grad_bound() == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(t.min_drift() == doctest::Approx(1.0));
}

TEST_CASE("tracing from the unit sphere in the radial field") {
    const FlowField f = radial_field();
    AdmissibleManifold m = unit_sphere_manifold();
    check_admissible(m, f, 32);
    TracingSamplingOptions sopts;
    sopts.samples = 1500;
    const double eps = 0.3;
    const TracingFunction t = TracingFunction::from_manifold(m, f, eps, sopts);

    // oracle: the radial arclength gives f(x) = 1 - |x| on the annulus
    for (double r : {0.75, 0.9, 1.0, 1.1, 1.25}) {
        const Vec x = r * pt(std::cos(1.1), std::sin(1.1));
        CHECK(t(x) == doctest::Approx(1.0 - r).epsilon(1e-7));
    }
    // clamped far inside/outside
    CHECK(t(pt(0.05, 0)) == doctest::Approx(2.0 * eps));
    CHECK(t(pt(1.9, 0)) == doctest::Approx(-2.0 * eps));

    CHECK(t.grad_bound() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(t.min_drift() == doctest::Approx(1.0 - eps).epsilon(0.02));
}

TEST_CASE("tracing property holds on sampled points of E") {
    const FlowField f = radial_field();
    AdmissibleManifold m = unit_sphere_manifold();
    check_admissible(m, f, 32);
    TracingSamplingOptions sopts;
    sopts.samples = 800;
    const TracingFunction t = TracingFunction::from_manifold(m, f, 0.3, sopts);

    Rng rng(888);
    const double h = 1e-6;
    int branch_sign = 0;
    for (int i = 0; i < 40; ++i) {
        const double r = rng.uniform(0.75, 1.25);
        const Vec x = r * rng.unit_vector(2);
        if (std::abs(t(x)) >= 0.28) continue;
        Vec g(2);
        for (int d = 0; d < 2; ++d) {
            Vec xp = x, xm = x;
            xp[d] += h;
            xm[d] -= h;
            g[d] = (t(xp) - t(xm)) / (2.0 * h);
        }
        const double along = g.dot(f.b(x));
        CHECK(std::abs(std::abs(along) - f.b(x).norm()) < 1e-5);
        const int s = along > 0 ? 1 : -1;
        if (branch_sign == 0) branch_sign = s;
        CHECK(s == branch_sign);  // one uniform sign branch on E
    }
}

TEST_CASE("tracing from the radial attractor") {
    const FlowField f = radial_field();
    const Equilibrium eq = classify_equilibrium(f, pt(0, 0));
    TracingSamplingOptions sopts;
    sopts.samples = 400;
    const double eps = 0.5;
    const TracingFunction t =
        TracingFunction::from_equilibrium(f, eq, eps, Box::cube(2, -1, 1), {}, sopts);

    CHECK(t(pt(0, 0)) == 0.0);
    for (double r : {0.1, 0.3, 0.49, 0.7}) {
        const Vec w = r * pt(1, 0);
        CHECK(t(w) == doctest::Approx(std::min(r, eps)).epsilon(1e-7));
        CHECK(t(w) >= std::min(r, eps) - 1e-9);  // lower bound with C_E = 1
    }
    CHECK(t.q1() == 0.0);
    CHECK(t.q2() == eps);
}

TEST_CASE("key estimate on the constant-field strip") {
    const FlowField f = constant_field(1, 0);
    const LocalAction a = LocalAction::sde_randers(f);
    const Box box(pt(-0.5, -1), pt(1.5, 1));
    TracingSamplingOptions sopts;
    sopts.samples = 1000;
    const TracingFunction t =
        TracingFunction::from_function(2, [](const Vec& x) { return x[0]; }, 0.0, 1.0, f, box, sopts);
    CHECK(t.grad_bound() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(t.min_drift() == doctest::Approx(1.0));

    // hand oracle: reversed unit segment has S = 2, delta term 2, so
    // lhs = 1 <= 2*2 + 2 = 6
    Curve rev;
    rev.nodes = {pt(1, 0), pt(0, 0)};
    const Curve fine = reparameterize_arclength(rev, 100).as_curve();
    const KeyEstimateResult r = key_estimate_bound(t, a, 1.0, fine);
    CHECK(r.lhs == doctest::Approx(1.0));
    CHECK(r.action == doctest::Approx(2.0));
    CHECK(r.delta_term == doctest::Approx(2.0));
    CHECK(r.rhs == doctest::Approx(6.0));
    CHECK(r.holds);

    // flowline inside the strip: lhs = |delta f| exactly, rhs twice that
    Curve with_flow;
    with_flow.nodes = {pt(0.1, 0.3), pt(0.8, 0.3)};
    const KeyEstimateResult r2 =
        key_estimate_bound(t, a, 1.0, reparameterize_arclength(with_flow, 60).as_curve());
    CHECK(r2.lhs == doctest::Approx(0.7));
    CHECK(r2.action < 1e-12);
    CHECK(r2.rhs == doctest::Approx(1.4));
    CHECK(r2.holds);
}

TEST_CASE("key estimate sweep over random strip polylines") {
    const FlowField f = constant_field(1, 0);
    const LocalAction a = LocalAction::sde_randers(f);
    const Box box(pt(-0.5, -1), pt(1.5, 1));
    TracingSamplingOptions sopts;
    sopts.samples = 1000;
    const TracingFunction t =
        TracingFunction::from_function(2, [](const Vec& x) { return x[0]; }, 0.0, 1.0, f, box, sopts);

    Rng rng(5150);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Vec> wp;
        for (int k = 0; k < 6; ++k) wp.push_back(rng.point_in_box(box));
        Curve raw;
        raw.nodes = std::move(wp);
        const std::size_t nodes = 400;
        const Curve c = reparameterize_arclength(raw, nodes).as_curve();
        const double spacing = curve_length(c) / static_cast<double>(nodes - 1);
        const KeyEstimateResult r = key_estimate_bound(t, a, 1.0, c, 1e-6 + 2.0 * spacing);
        CHECK(r.holds);
    }
}

TEST_CASE("manifold evolution along the flow") {
    const FlowField f = radial_field();

    // frozen flow keeps the manifold identical
    AdmissibleManifold m = unit_sphere_manifold();
    check_admissible(m, f, 32);
    const EvolvedManifold frozen = evolve_manifold(m, f, [](const Vec&) { return 0.0; }, 3.0);
    Rng rng(6);
    for (int i = 0; i < 10; ++i) {
        const Vec x = rng.point_in_box(Box::cube(2, -1.5, 1.5));
        CHECK(frozen.manifold.level(x) == doctest::Approx(m.level(x)).epsilon(1e-9));
    }
    CHECK(frozen.report.pass);

    // radial flow for ln 2 shrinks the unit sphere to radius 1/2
    const EvolvedManifold shrunk = evolve_manifold(m, f, [](const Vec&) { return 1.0; }, std::log(2.0));
    CHECK(shrunk.report.pass);
    for (int i = 0; i < 12; ++i) {
        const double phi = i * 0.5;
        CHECK(std::abs(shrunk.manifold.level(0.5 * pt(std::cos(phi), std::sin(phi)))) < 1e-8);
    }

    // state-dependent modulation: beta = |x|^2 turns the radial flow into
    // r' = -r^3, so the unit sphere lands at radius 1/sqrt(1 + 2T). The
    // reversed flow blows up in finite time 1/(2 r0^2), so the box and T are
    // chosen with the corners' blow-up time (0.207) above T.
    AdmissibleManifold tight(
        2, [](const Vec& x) { return x.squaredNorm() - 1.0; },
        [](const Vec& x) { return Vec(2.0 * x); }, Box::cube(2, -1.1, 1.1));
    check_admissible(tight, f, 32);
    const double T = 0.15;
    const EvolvedManifold cubic =
        evolve_manifold(tight, f, [](const Vec& x) { return x.squaredNorm(); }, T);
    CHECK(cubic.report.pass);
    const double r_oracle = 1.0 / std::sqrt(1.0 + 2.0 * T);
    for (int i = 0; i < 8; ++i) {
        const double phi = 0.9 * i;
        CHECK(std::abs(cubic.manifold.level(r_oracle * pt(std::cos(phi), std::sin(phi)))) < 1e-7);
    }

    // constant-field hyperplane shifts by T (pointwise identity; the zero
    // set of a plane necessarily reaches the box boundary, so no compact
    // admissibility is claimed here)
    const FlowField cf = constant_field(1, 0);
    AdmissibleManifold plane(
        2, [](const Vec& x) { return x[0]; }, [](const Vec&) { return pt(1, 0); },
        Box::cube(2, -2, 2));
    auto shifted_level = [&](const Vec& x) {
        const Vec pre = integrate_ode([&cf](const Vec& y) { return cf.b(y); }, x, -0.7);
        return plane.level(pre);
    };
    for (int i = 0; i < 8; ++i) {
        const Vec x = rng.point_in_box(Box::cube(2, -1, 1));
        CHECK(shifted_level(x) == doctest::Approx(x[0] - 0.7).epsilon(1e-9));
    }
}

TEST_CASE("sign invariant of admissible manifolds along the flow") {
    const FlowField f = make_field("double_well", {}, 2);
    const auto V = make_potential("double_well", 2);
    AdmissibleManifold m(2, [V](const Vec& x) { return 0.1 - V(x); }, Box::cube(2, -2, 2));
    const AdmissibilityReport rep = check_admissible(m, f, 24);
    REQUIRE(rep.pass);
    Rng rng(7777);
    for (const Vec& z : rep.zero_points) {
        for (int k = 0; k < 4; ++k) {
            const double tt = rng.uniform(-1.0, 1.0);
            if (std::abs(tt) < 1e-3) continue;
            try {
                const double val = m.level(flow(f, z, tt));
                CHECK(val * tt > 0.0);
            } catch (const DivergenceError&) {
                // gradient ascent of the quartic blows up in finite time;
                // the invariant is only assertable while the flow exists
            }
        }
    }
}
