#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "minact/functional.hpp"
#include "minact/scenario.hpp"

using namespace minact;

namespace {

Vec pt(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

FlowField constant_field(double bx, double by) {
    Vec b0 = pt(bx, by);
    return FlowField(2, [b0](const Vec&) { return b0; });
}

Curve segment(const Vec& a, const Vec& b, std::size_t nodes) {
    Curve raw;
    raw.nodes = {a, b};
    return reparameterize_arclength(raw, nodes).as_curve();
}

} // namespace

TEST_CASE("geometric action of flowlines and their reversal") {
    const LocalAction a = LocalAction::sde_randers(constant_field(1, 0));
    const Curve with_flow = segment(pt(0, 0), pt(1, 0), 11);
    CHECK(geometric_action(a, with_flow) == doctest::Approx(0.0));
    CHECK(geometric_action(a, reverse(with_flow)) == doctest::Approx(2.0));
}

TEST_CASE("riemannian action with the identity metric is the length") {
    const LocalAction a = LocalAction::riemannian(2, [](const Vec&) { return Mat(Mat::Identity(2, 2)); });
    Rng rng(12);
    for (int i = 0; i < 10; ++i) {
        std::vector<Vec> ns;
        for (int k = 0; k < 7; ++k) ns.push_back(rng.point_in_box(Box::cube(2, -2, 2)));
        const Curve c(std::move(ns));
        CHECK(geometric_action(a, c) == doctest::Approx(curve_length(c)).epsilon(1e-12));
    }
}

TEST_CASE("uphill double-well action matches twice the potential difference") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction a = LocalAction::sde_randers(f);
    const Curve uphill = segment(pt(-1, 0), pt(0, 0), 400);
    // gradient-drift oracle: S = 2 (V(0,0) - V(-1,0)) for the ascent along
    // the axis, with V the double-well potential
    const auto V = make_potential("double_well", 2);
    const double oracle = 2.0 * (V(pt(0, 0)) - V(pt(-1, 0)));
    CHECK(oracle == doctest::Approx(0.5));
    CHECK(std::abs(geometric_action(a, uphill) - oracle) < 0.005);
}

TEST_CASE("time action of a sampled flowline is near zero") {
    const FlowField f = make_field("double_well", {}, 2);
    const Hamiltonian h = sde_hamiltonian(f);
    TimePath p;
    const double dt = 1e-3;
    Vec x = pt(0.4, 0.3);
    for (int i = 0; i <= 2000; ++i) {
        p.times.push_back(i * dt);
        p.states.push_back(x);
        if (i < 2000) x = flow(f, x, dt);
    }
    CHECK(time_action(h, p) < 1e-4);
}

TEST_CASE("time action of a transverse straight path") {
    const Hamiltonian h = sde_hamiltonian(constant_field(1, 0));
    TimePath p;
    const std::size_t m = 1000;
    for (std::size_t i = 0; i <= m; ++i) {
        const double t = static_cast<double>(i) / m;
        p.times.push_back(t);
        p.states.push_back(pt(0, t));
    }
    // L = 1/2 |(0,1) - (1,0)|^2 = 1 along the whole path
    CHECK(time_action(h, p) == doctest::Approx(1.0).epsilon(1e-6));

    // doubling the speed on [0, 1/2]: integral of 1/2 |(0,2)-(1,0)|^2 = 1.25
    TimePath q;
    for (std::size_t i = 0; i <= m; ++i) {
        const double t = 0.5 * static_cast<double>(i) / m;
        q.times.push_back(t);
        q.states.push_back(pt(0, 2.0 * t));
    }
    CHECK(time_action(h, q) == doctest::Approx(1.25).epsilon(1e-6));
}

TEST_CASE("time action rejects nonmonotone timestamps") {
    const Hamiltonian h = sde_hamiltonian(constant_field(1, 0));
    TimePath p;
    p.times = {0.0, 0.5, 0.5};
    p.states = {pt(0, 0), pt(0, 1), pt(0, 2)};
    CHECK_THROWS_AS(time_action(h, p), ConfigError);
}

TEST_CASE("double minimization: geometric action lower-bounds the T family") {
    const Hamiltonian h = sde_hamiltonian(constant_field(1, 0));
    const Curve against = segment(pt(1, 0), pt(0, 0), 200);

    std::vector<double> T_grid;
    for (int k = -8; k <= 8; ++k) T_grid.push_back(std::pow(2.0, 0.25 * k));
    const DoubleInfReport rep = compare_double_inf(h, against, T_grid);

    // oracle: S_T of the constant-speed parameterization on [0,T] is
    // T/2 (1/T + 1)^2 ... = 1/(2T) + 1 + T/2, minimized at T = 1 with value 2
    for (std::size_t i = 0; i < T_grid.size(); ++i) {
        const double T = rep.t_values[i];
        CHECK(rep.time_actions[i] == doctest::Approx(0.5 / T + 1.0 + 0.5 * T).epsilon(1e-9));
    }
    CHECK(rep.min_time_action == doctest::Approx(2.0));
    CHECK(rep.t_at_min == doctest::Approx(1.0));
    CHECK(rep.geometric == doctest::Approx(2.0));
    CHECK(rep.geometric_leq_min);

    // flowline: both sides vanish
    const Curve with_flow = segment(pt(0, 0), pt(1, 0), 50);
    const DoubleInfReport rep2 = compare_double_inf(h, with_flow, {0.5, 1.0, 2.0});
    CHECK(rep2.geometric < 1e-10);
    CHECK(rep2.min_time_action < 1e-3);
    CHECK(rep2.geometric_leq_min);
}

TEST_CASE("action upper bound from the unit-sphere maximization") {
    const LocalAction a = LocalAction::sde_randers(constant_field(1, 0));
    const Box K = Box::cube(2, -1, 1);
    // oracle: max over the unit circle of |y| - y_1 is 2, so B = 3
    CHECK(action_bound_constant(a, K) == doctest::Approx(3.0));

    const Curve unit = segment(pt(0, 0), pt(0, 1), 9);
    const double bound = action_upper_bound(a, unit, K);
    CHECK(bound == doctest::Approx(3.0));
    CHECK(geometric_action(a, unit) <= bound);

    const LocalAction riem = LocalAction::riemannian(2, [](const Vec&) { return Mat(Mat::Identity(2, 2)); });
    CHECK(action_upper_bound(riem, unit, K) == doctest::Approx(2.0));

    const Curve degenerate({pt(0.5, 0.5), pt(0.5, 0.5)});
    CHECK(action_upper_bound(a, degenerate, K) == doctest::Approx(0.0));

    const Curve outside = segment(pt(0, 0), pt(3, 0), 9);
    CHECK_THROWS_AS(action_upper_bound(a, outside, K), DomainError);
}

TEST_CASE("upper bound dominates the action on random curves") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction a = LocalAction::sde_randers(f);
    const Box K = Box::cube(2, -2, 2);
    const double B = action_bound_constant(a, K);
    Rng rng(3210);
    for (int i = 0; i < 25; ++i) {
        std::vector<Vec> ns;
        for (int k = 0; k < 8; ++k) ns.push_back(rng.point_in_box(K));
        const Curve c(std::move(ns));
        CHECK(geometric_action(a, c) <= B * curve_length(c) * (1.0 + 1e-12));
    }
}

TEST_CASE("drift lower bound sweeps") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction randers = LocalAction::sde_randers(f);
    const Box K = Box::cube(2, -2, 2);

    // the Randers action is its own drift bound with A = 1
    const BoundReport own = drift_lower_bound_check(randers, f, 1.0, K, 2000, 17);
    CHECK(own.violations == 0);
    CHECK(own.margin >= -1e-12);

    // Markov-jump action against its Kurtz drift with the computed constant
    JumpProcess jp;
    jp.rates = {[](const Vec&) { return 1.0; }, [](const Vec& x) { return x[0]; }};
    jp.jumps = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
    const Hamiltonian hbd = markov_jump_hamiltonian(1, std::move(jp));
    const LocalAction bd = LocalAction::hamiltonian(hbd);
    const FlowField kurtz = natural_drift(hbd);
    const Box Kx(Vec::Constant(1, 0.2), Vec::Constant(1, 3.0));
    const double A = drift_constant(hbd, Kx, GridSpec::uniform(1, 33));
    const BoundReport ok = drift_lower_bound_check(bd, kurtz, A, Kx, 2000, 18);
    CHECK(ok.violations == 0);

    // falsification probe: far beyond the valid constant the margin flips
    const BoundReport bad = drift_lower_bound_check(bd, kurtz, 40.0 * A, Kx, 2000, 18);
    CHECK(bad.violations > 0);
    CHECK(bad.margin < 0.0);
}

TEST_CASE("refinement convergence of the chord sum on smooth data") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction a = LocalAction::sde_randers(f);
    auto sample = [](std::size_t m) {
        std::vector<Vec> ns;
        for (std::size_t i = 0; i < m; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(m - 1);
            ns.push_back(pt(-1.0 + 2.0 * t, 0.4 * std::sin(M_PI * t)));
        }
        return Curve(std::move(ns));
    };

    std::vector<double> S;
    for (std::size_t m : {50u, 100u, 200u, 400u, 800u}) S.push_back(geometric_action(a, sample(m)));
    double prev_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < S.size(); ++i) {
        const double gap = std::abs(S[i] - S[i - 1]);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    // Richardson ratio of the second-order midpoint rule
    const double ratio = (S[1] - S[2]) / (S[2] - S[3]);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("chord sum is exactly parameterization independent for constant coefficients") {
    const LocalAction a = LocalAction::sde_randers(constant_field(0.7, -0.4));
    Rng rng(2024);
    Curve c;
    c.nodes = {pt(0, 0), pt(1, 1)};
    const double S_ref = geometric_action(a, c);
    for (int trial = 0; trial < 10; ++trial) {
        // non-uniform nodes along the same straight segment
        std::vector<double> ts{0.0, 1.0};
        for (int k = 0; k < 15; ++k) ts.push_back(rng.unit());
        std::sort(ts.begin(), ts.end());
        std::vector<Vec> ns;
        for (double t : ts) ns.push_back(pt(t, t));
        const double S = geometric_action(a, Curve(std::move(ns)));
        CHECK(std::abs(S - S_ref) < 1e-9);
    }
}

TEST_CASE("additivity under concatenation") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction a = LocalAction::sde_randers(f);
    const Curve left = segment(pt(-1, 0.2), pt(0, 0.4), 40);
    const Curve right = segment(pt(0, 0.4), pt(1, -0.1), 40);
    const double sum = geometric_action(a, left) + geometric_action(a, right);
    CHECK(std::abs(geometric_action(a, concat(left, right)) - sum) < 1e-12);
}

TEST_CASE("the action dominates the drift-bound chord sum") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction a = LocalAction::hamiltonian(sde_hamiltonian(f));
    const Box K = Box::cube(2, -2, 2);
    const double A = drift_constant(*a.hamiltonian_backing(), K, GridSpec::uniform(2, 9));
    Rng rng(4321);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec> ns;
        for (int k = 0; k < 6; ++k) ns.push_back(rng.point_in_box(K));
        const Curve c = reparameterize_arclength(Curve(std::move(ns)), 120).as_curve();
        double bound_sum = 0.0;
        for (std::size_t i = 1; i < c.nodes.size(); ++i) {
            const Vec mid = 0.5 * (c.nodes[i] + c.nodes[i - 1]);
            const Vec dz = c.nodes[i] - c.nodes[i - 1];
            const Vec b = f.b(mid);
            bound_sum += A * (b.norm() * dz.norm() - b.dot(dz));
        }
        CHECK(geometric_action(a, c) >= bound_sum - 1e-9);
    }
}

TEST_CASE("numerically integrated flowlines cost nearly nothing") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction a = LocalAction::hamiltonian(sde_hamiltonian(f));
    const Curve fl = flowline_curve(f, pt(0.05, 1.8), +1.0, 1.6);
    const double len = curve_length(fl);
    CHECK(len >= 1.0);
    CHECK(geometric_action(a, fl) < 1e-6 * len);
}
