#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "minact/criteria.hpp"
#include "minact/scenario.hpp"

using namespace minact;

namespace {

Vec pt(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

AdmissibleManifold sphere(Vec c, double r, double pad = 2.0) {
    return AdmissibleManifold(
        2, [c, r](const Vec& x) { return (x - c).squaredNorm() - r * r; },
        [c](const Vec& x) { return Vec(2.0 * (x - c)); },
        Box(Vec(c.array() - pad * r), Vec(c.array() + pad * r)));
}

// sphere manifolds around the wells plus the outer potential level set,
// all admissibility-checked and oriented
std::vector<AdmissibleManifold> double_well_manifolds(const FlowField& f) {
    const auto V = make_potential("double_well", 2);
    std::vector<AdmissibleManifold> ms;
    ms.push_back(sphere(pt(-1, 0), 0.3));
    ms.push_back(sphere(pt(1, 0), 0.3));
    ms.push_back(AdmissibleManifold(2, [V](const Vec& x) { return 0.5 - V(x); }, Box::cube(2, -3, 3)));
    for (auto& m : ms) {
        const AdmissibilityReport rep = check_admissible(m, f, 48);
        REQUIRE(rep.pass);
    }
    return ms;
}

} // namespace

TEST_CASE("prop0: positive actions grant strong verdicts") {
    const LocalAction riem = LocalAction::riemannian(2, [](const Vec&) { return Mat(Mat::Identity(2, 2)); });
    const auto v = check_prop0(riem, pt(0.3, -0.7));
    REQUIRE(v.has_value());
    CHECK(v->verdict == Verdict::Strong);
    CHECK(v->criterion == Criterion::Prop0);
    CHECK(v->margin == doctest::Approx(1.0));
}

TEST_CASE("prop0 on the quantum-tunnelling action applies away from potential roots") {
    const auto U = make_potential("double_well", 2);
    const LocalAction agmon = LocalAction::agmon(2, U);
    CHECK(check_prop0(agmon, pt(0, 0)).has_value());        // U(0,0) = 1/4 > 0
    CHECK_FALSE(check_prop0(agmon, pt(1, 0)).has_value());  // root of U
}

TEST_CASE("prop0 refuses degenerate directions of drift actions") {
    const FlowField f = make_field("double_well", {}, 2);
    CHECK_FALSE(check_prop0(LocalAction::sde_randers(f), pt(0.5, 0.2)).has_value());
    // and the Hamiltonian route agrees through H(x,0) = 0
    CHECK_FALSE(check_prop0(LocalAction::hamiltonian(sde_hamiltonian(f)), pt(0.5, 0.2)).has_value());
}

TEST_CASE("prop0 and criticality exclude each other") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction a = LocalAction::hamiltonian(sde_hamiltonian(f));
    const Hamiltonian& h = *a.hamiltonian_backing();
    for (const Vec& x : {pt(1, 0), pt(0, 0), pt(0.4, 0.1)}) {
        const bool critical = is_critical_point(h, x);
        const bool strong0 = check_prop0(a, x).has_value();
        CHECK_FALSE((critical && strong0));
    }
}

TEST_CASE("prop1 grants strong verdicts on flowlines through manifolds") {
    const FlowField f = make_field("double_well", {}, 2);
    auto ms = double_well_manifolds(f);

    const Vec x = pt(0.5, 0.2);
    const auto v = check_prop1(f, ms, x, 50.0);
    REQUIRE(v.has_value());
    CHECK(v->verdict == Verdict::Strong);
    CHECK(v->criterion == Criterion::Prop1);
    REQUIRE(v->manifold_id >= 0);
    // the certificate: psi(x, -t_cross) lies on the manifold
    const Vec on_m = flow(f, x, -v->crossing_time);
    CHECK(std::abs(ms[static_cast<std::size_t>(v->manifold_id)].level(on_m)) < 1e-8);
}

TEST_CASE("prop1 refuses roots of the drift") {
    const FlowField f = make_field("double_well", {}, 2);
    auto ms = double_well_manifolds(f);
    CHECK_FALSE(check_prop1(f, ms, pt(0, 0), 50.0).has_value());
}

TEST_CASE("prop1 finds nothing from a limit cycle") {
    const FlowField f = make_field("limit_cycle", {}, 2);
    std::vector<AdmissibleManifold> ms;
    ms.push_back(sphere(pt(0, 0), 0.5, 1.5));
    const AdmissibilityReport rep = check_admissible(ms[0], f, 48);
    REQUIRE(rep.pass);
    const Vec on_cycle = pt(1, 0);
    CHECK_FALSE(check_prop1(f, ms, on_cycle, 30.0).has_value());
}

TEST_CASE("prop2 on the double-well equilibria") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction a = LocalAction::sde_randers(f);
    auto ms = double_well_manifolds(f);

    const Equilibrium attractor = classify_equilibrium(f, pt(-1, 0));
    const auto va = check_prop2(f, a, attractor, ms);
    REQUIRE(va.has_value());
    CHECK(va->criterion == Criterion::Prop2Attractor);
    CHECK(va->verdict == Verdict::Strong);  // linearization gives a clean Hoelder fit
    CHECK(va->margin == doctest::Approx(1.0).epsilon(0.1));  // slope near 1

    const Equilibrium saddle = classify_equilibrium(f, pt(0, 0));
    const auto vs = check_prop2(f, a, saddle, ms);
    REQUIRE(vs.has_value());
    CHECK(vs->criterion == Criterion::Prop2Saddle);
    CHECK(vs->verdict == Verdict::Strong);

    // no manifolds, no saddle coverage
    CHECK_FALSE(check_prop2(f, a, saddle, {}).has_value());
}

TEST_CASE("prop2 keeps weak verdicts when the state constraint is not declared") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction a = LocalAction::sde_randers(f);
    auto ms = double_well_manifolds(f);
    CriteriaOptions opts;
    opts.e_set_condition_ok = false;
    const auto v = check_prop2(f, a, classify_equilibrium(f, pt(1, 0)), ms, opts);
    REQUIRE(v.has_value());
    CHECK(v->verdict == Verdict::Weak);
}

TEST_CASE("holder check is the criticality test for Hamiltonian actions") {
    const FlowField f = make_field("double_well", {}, 2);
    const Hamiltonian h = sde_hamiltonian(f);
    CHECK(check_holder(h, pt(1, 0)));
    CHECK_FALSE(check_holder(h, pt(0.5, 0)));

    // quantum tunnelling at a quadratic root of the potential
    const auto U = make_potential("double_well", 2);
    const Hamiltonian hq = agmon_hamiltonian(2, U);
    CHECK(check_holder(hq, pt(1, 0)));
    CHECK_FALSE(check_holder(hq, pt(0.5, 0)));
}

TEST_CASE("grid classification of the double-well scenario") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction a = LocalAction::sde_randers(f);
    ClassifyContext ctx;
    ctx.field = &f;
    ctx.action = &a;
    ctx.manifolds = double_well_manifolds(f);
    ctx.equilibria = find_equilibria(f, Box::cube(2, -2, 2), GridSpec::uniform(2, 9));

    const auto verdicts = classify_grid(ctx, Box::cube(2, -2, 2), GridSpec::uniform(2, 11));
    REQUIRE(verdicts.size() == 121);
    for (const auto& v : verdicts) {
        const bool good = (v.verdict == Verdict::Strong) || (v.verdict == Verdict::Weak);
        CHECK(good);
    }
    // repeated run is byte-identical in verdicts and margins
    const auto again = classify_grid(ctx, Box::cube(2, -2, 2), GridSpec::uniform(2, 11));
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        CHECK(verdicts[i].verdict == again[i].verdict);
        CHECK(verdicts[i].criterion == again[i].criterion);
        CHECK(verdicts[i].margin == again[i].margin);
        CHECK(verdicts[i].crossing_time == again[i].crossing_time);
    }
}

TEST_CASE("riemannian scenario classifies everything strong through prop0") {
    const FlowField f = make_field("double_well", {}, 2);  // drift irrelevant for the metric
    const LocalAction a = LocalAction::riemannian(2, [](const Vec&) { return Mat(Mat::Identity(2, 2)); });
    ClassifyContext ctx;
    ctx.field = &f;
    ctx.action = &a;
    const auto verdicts = classify_grid(ctx, Box::cube(2, -2, 2), GridSpec::uniform(2, 7));
    for (const auto& v : verdicts) {
        CHECK(v.verdict == Verdict::Strong);
        CHECK(v.criterion == Criterion::Prop0);
    }
}

TEST_CASE("points on a limit cycle are classified non-existent for drift actions") {
    const FlowField f = make_field("limit_cycle", {}, 2);
    const LocalAction a = LocalAction::sde_randers(f);

    ClassifyContext ctx;
    ctx.field = &f;
    ctx.action = &a;
    ctx.manifolds.push_back(sphere(pt(0, 0), 0.5, 1.5));
    REQUIRE(check_admissible(ctx.manifolds[0], f, 48).pass);
    ctx.equilibria = find_equilibria(f, Box::cube(2, -2, 2), GridSpec::uniform(2, 9));
    const LimitCycleReport cyc = detect_limit_cycle(f, pt(0.2, 0), 120.0);
    REQUIRE(cyc.found);
    ctx.limit_cycle = orbit_curve(f, *cyc.sample_point, *cyc.period, 512);
    ctx.opts.t_max = 30.0;

    // sampled points on the cycle
    std::vector<Vec> on_cycle;
    for (int k = 0; k < 12; ++k)
        on_cycle.push_back(ctx.limit_cycle->nodes[k * 40]);
    for (const auto& v : classify_points(ctx, on_cycle)) {
        CHECK(v.verdict == Verdict::NonExistence);
        CHECK(v.criterion == Criterion::LimitCycleNegative);
    }

    // interior points (off the cycle, off the origin) are covered by prop1
    const auto inner = classify_points(ctx, {pt(0.3, 0.2), pt(-0.4, 0.5), pt(0.7, 0)});
    for (const auto& v : inner) {
        CHECK(v.verdict == Verdict::Strong);
        CHECK(v.criterion == Criterion::Prop1);
    }

    // the repellor at the origin gets its prop2 verdict
    const auto origin = classify_points(ctx, {pt(0, 0)});
    CHECK(origin[0].criterion == Criterion::Prop2Repellor);

    // with a non-drift action the same cycle points stay none-applicable
    const LocalAction riem = LocalAction::riemannian(2, [](const Vec&) { return Mat(0.0001 * Mat::Identity(2, 2)); });
    ClassifyContext ctx2 = ctx;
    ctx2.action = &riem;
    const auto v2 = classify_points(ctx2, {on_cycle[0]});
    CHECK(v2[0].verdict != Verdict::NonExistence);
}

TEST_CASE("holder fit sees the linear decay of the drift near an attractor") {
    const FlowField f = make_field("double_well", {}, 2);
    const LocalAction a = LocalAction::sde_randers(f);
    const HolderFit fit = holder_fit(a, pt(-1, 0));
    CHECK(fit.ok);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.05));
    CHECK(fit.r_squared > 0.99);
}
