#ifndef MINACT_CRITERIA_HPP
#define MINACT_CRITERIA_HPP

#include <optional>
#include <string>
#include <vector>

#include "minact/manifold.hpp"

namespace minact {

enum class Verdict { Strong, Weak, NoneApplicable, NonExistence };
enum class Criterion {
    Prop0,
    Prop1,
    Prop2Attractor,
    Prop2Repellor,
    Prop2Saddle,
    LimitCycleNegative,
    None
};

const char* to_string(Verdict v);
const char* to_string(Criterion c);

struct CriteriaVerdict {
    Vec point;
    Verdict verdict = Verdict::NoneApplicable;
    Criterion criterion = Criterion::None;
    // evidence
    double margin = 0.0;
    int manifold_id = -1;
    double crossing_time = 0.0;
    Eigen::VectorXcd eigenvalues;
    std::string note;
};

struct CriteriaOptions {
    double tol_pos = 1e-8;        // positivity threshold for prop0
    int directions = 64;          // unit directions sampled by prop0
    double t_max = 50.0;          // flow budget for prop1 crossing search
    double b_zero_tol = 1e-9;     // |b(x)| below this counts as a root
    bool e_set_condition_ok = true;  // state-constraint condition declared by config
    // Hoelder fit (the strong upgrade of prop2)
    int holder_radii = 8;
    double holder_r_min = 1e-4;
    double holder_r_max = 1e-1;
    double holder_slope_min = 0.1;
    double holder_r2_min = 0.99;
    int holder_dirs = 16;
    double scale = 1.0;
    // saddle coverage
    double saddle_arc_budget = 4.0;
    double cycle_band = 1e-6;  // distance to the cycle polyline that counts as "on the cycle"
    IntegratorOptions integrator;
};

/// Positivity criterion: min over sampled unit y of l(x,y) > tol_pos (for
/// Hamiltonian-backed actions, equivalently H(x,0) < -tol_pos). Grants a
/// strong verdict; absent when the test fails.
std::optional<CriteriaVerdict> check_prop0(const LocalAction& a, const Vec& x,
                                           const CriteriaOptions& opts = {});

/// Manifold criterion: x lies on a flowline through some admissible manifold
/// (found by integrating forward/backward up to t_max). Strong verdict with
/// manifold id and crossing time as evidence.
std::optional<CriteriaVerdict> check_prop1(const FlowField& f,
                                           const std::vector<AdmissibleManifold>& manifolds, const Vec& x,
                                           double t_max, const CriteriaOptions& opts = {});

/// Equilibrium criterion: attractors/repellors get weak verdicts, upgraded
/// to strong when the Hoelder regression on l near the point succeeds and
/// the state-constraint condition is declared. 2-D saddles additionally need
/// every invariant-manifold branch to cross some admissible manifold; for
/// dim > 2 the strong upgrade is refused (open in the theory).
std::optional<CriteriaVerdict> check_prop2(const FlowField& f, const LocalAction& a, const Equilibrium& eq,
                                           const std::vector<AdmissibleManifold>& manifolds,
                                           const CriteriaOptions& opts = {});

/// Hoelder-continuity proxy for the strong condition at x: true iff x is a
/// critical point of the Hamiltonian (assumes Hoelder data; recorded in the
/// verdict note by callers).
bool check_holder(const Hamiltonian& h, const Vec& x);

struct HolderFit {
    bool ok = false;
    double slope = 0.0;
    double r_squared = 0.0;
};

/// log-log regression of max_{|w-x|=r,|y|=1} l(w,y) against r over
/// log-spaced radii.
HolderFit holder_fit(const LocalAction& a, const Vec& x, const CriteriaOptions& opts = {});

/// Scenario context shared by all points of a classification run; immutable
/// during the (data-parallel) scan.
struct ClassifyContext {
    const FlowField* field = nullptr;
    const LocalAction* action = nullptr;
    std::vector<AdmissibleManifold> manifolds;
    std::vector<Equilibrium> equilibria;
    std::optional<Curve> limit_cycle;  // polyline of a detected cycle
    CriteriaOptions opts;
};

CriteriaVerdict classify_point(const ClassifyContext& ctx, const Vec& x);
std::vector<CriteriaVerdict> classify_points(const ClassifyContext& ctx, const std::vector<Vec>& points,
                                             par::Mode mode = par::mode());
std::vector<CriteriaVerdict> classify_grid(const ClassifyContext& ctx, const Box& box, const GridSpec& grid,
                                           par::Mode mode = par::mode());

/// Distance from a point to a polyline (minimum over segments).
double distance_to_polyline(const Vec& x, const Curve& c);

} // namespace minact

#endif
