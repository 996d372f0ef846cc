// Benchmark comparing the serial reference kernels against the OpenMP path:
// chord-sum action evaluation, finite-difference curve gradients, sampling
// sweeps, and grid classification. Results must agree bit-for-bit.

#include <chrono>
#include <cstdio>
#include <vector>

#include "minact/criteria.hpp"
#include "minact/functional.hpp"
#include "minact/minimizer.hpp"
#include "minact/scenario.hpp"

using namespace minact;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Row {
    const char* name;
    double serial_ms;
    double omp_ms;
    bool equal;
};

void print(const Row& r) {
    std::printf("%-28s %10.1f ms %10.1f ms   speedup %.2fx   results %s\n", r.name, r.serial_ms,
                r.omp_ms, r.serial_ms / r.omp_ms, r.equal ? "identical" : "DIFFER");
}

Curve big_curve(std::size_t nodes) {
    Rng rng(11);
    std::vector<Vec> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(rng.point_in_box(Box::cube(2, -1.8, 1.8)));
    Curve raw;
    raw.nodes = std::move(pts);
    return reparameterize_arclength(raw, nodes).as_curve();
}

} // namespace

int main() {
    const FlowField field = make_field("double_well", {}, 2);
    const LocalAction action = LocalAction::sde_randers(field);

    std::printf("threads available: %d\n\n", par::thread_count());

    {
        const Curve c = big_curve(2'000'000);
        geometric_action(action, c, par::Mode::Serial);  // warm the pages
        auto t0 = Clock::now();
        const double s_serial = geometric_action(action, c, par::Mode::Serial);
        const double ms_s = ms_since(t0);
        t0 = Clock::now();
        const double s_omp = geometric_action(action, c, par::Mode::OpenMP);
        const double ms_p = ms_since(t0);
        print({"chord sum (2M chords)", ms_s, ms_p, s_serial == s_omp});
    }

    {
        // minimization of the Hamiltonian-backed action: every local-action
        // evaluation runs a constrained Newton solve, which is the regime
        // where the data-parallel gradient pays off
        MinimizeProblem p{LocalAction::hamiltonian(sde_hamiltonian(field)),
                          EndpointSet::point((Vec(2) << -1, 0).finished()),
                          EndpointSet::point((Vec(2) << 1, 0).finished())};
        p.nodes = 200;
        p.box = Box::cube(2, -2, 2);
        p.max_iters = 10;
        Curve bent;
        bent.nodes = {(Vec(2) << -1, 0).finished(), (Vec(2) << -0.2, 0.7).finished(),
                      (Vec(2) << 0.5, 0.5).finished(), (Vec(2) << 1, 0).finished()};
        auto t0 = Clock::now();
        const MinimizeResult r_serial = minimize(p, bent, par::Mode::Serial);
        const double ms_s = ms_since(t0);
        t0 = Clock::now();
        const MinimizeResult r_omp = minimize(p, bent, par::Mode::OpenMP);
        const double ms_p = ms_since(t0);
        print({"fd-gradient minimize (newton)", ms_s, ms_p,
               r_serial.action_value == r_omp.action_value});
    }

    {
        const Box box = Box::cube(2, -2, 2);
        auto t0 = Clock::now();
        const BoundReport r_serial =
            drift_lower_bound_check(action, field, 1.0, box, 400000, 42, par::Mode::Serial);
        const double ms_s = ms_since(t0);
        t0 = Clock::now();
        const BoundReport r_omp =
            drift_lower_bound_check(action, field, 1.0, box, 400000, 42, par::Mode::OpenMP);
        const double ms_p = ms_since(t0);
        print({"sampling sweep (400k)", ms_s, ms_p, r_serial.margin == r_omp.margin});
    }

    {
        ClassifyContext ctx;
        ctx.field = &field;
        ctx.action = &action;
        Vec c1(2), c2(2);
        c1 << -1, 0;
        c2 << 1, 0;
        AdmissibleManifold s1(2, [c1](const Vec& x) { return (x - c1).squaredNorm() - 0.09; },
                              Box(Vec(c1.array() - 0.6), Vec(c1.array() + 0.6)));
        AdmissibleManifold s2(2, [c2](const Vec& x) { return (x - c2).squaredNorm() - 0.09; },
                              Box(Vec(c2.array() - 0.6), Vec(c2.array() + 0.6)));
        AdmissibilityOptions aopts;
        check_admissible(s1, field, 32, aopts);
        check_admissible(s2, field, 32, aopts);
        ctx.manifolds = {s1, s2};
        const Box box = Box::cube(2, -2, 2);
        ctx.equilibria = find_equilibria(field, box, GridSpec::uniform(2, 9));
        const GridSpec grid = GridSpec::uniform(2, 41);

        auto t0 = Clock::now();
        const auto v_serial = classify_grid(ctx, box, grid, par::Mode::Serial);
        const double ms_s = ms_since(t0);
        t0 = Clock::now();
        const auto v_omp = classify_grid(ctx, box, grid, par::Mode::OpenMP);
        const double ms_p = ms_since(t0);
        bool equal = v_serial.size() == v_omp.size();
        for (std::size_t i = 0; equal && i < v_serial.size(); ++i)
            equal = v_serial[i].verdict == v_omp[i].verdict &&
                    v_serial[i].criterion == v_omp[i].criterion;
        print({"classify grid (41x41)", ms_s, ms_p, equal});
    }

    return 0;
}
