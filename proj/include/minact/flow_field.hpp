#ifndef MINACT_FLOW_FIELD_HPP
#define MINACT_FLOW_FIELD_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "minact/curve.hpp"
#include "minact/integrator.hpp"
#include "minact/types.hpp"

namespace minact {

/// Drift vector field b with its Jacobian (analytic or central-difference)
/// and the numerical flow psi(x,t) of x' = b(x).
class FlowField {
  public:
    using VectorFn = std::function<Vec(const Vec&)>;
    using JacobianFn = std::function<Mat(const Vec&)>;

    FlowField(int dim, VectorFn b);
    FlowField(int dim, VectorFn b, JacobianFn jacobian);

    int dim() const { return dim_; }
    Vec b(const Vec& x) const { return b_(x); }
    Mat jacobian(const Vec& x) const;
    bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }
    double jacobian_step() const { return h_jac_; }

  private:
    int dim_;
    VectorFn b_;
    JacobianFn jac_;
    double h_jac_ = 1e-6;
};

struct Equilibrium {
    enum class Kind { Attractor, Repellor, Saddle, Degenerate };

    Vec location;
    Eigen::VectorXcd eigenvalues;
    Kind kind = Kind::Degenerate;
};

const char* to_string(Equilibrium::Kind k);

struct LimitCycleReport {
    bool found = false;
    std::optional<Vec> sample_point;
    std::optional<double> period;
    double residual = std::numeric_limits<double>::infinity();
};

/// Regular grid of seed/sample points over a box.
struct GridSpec {
    std::vector<int> counts;

    std::size_t total() const;
    Vec point(const Box& box, std::size_t flat_index) const;
    static GridSpec uniform(int dim, int count_per_axis);
};

/// psi(x,t): adaptive integration of x' = b(x); flow(x,0) == x exactly.
Vec flow(const FlowField& f, const Vec& x, double t, const IntegratorOptions& opts = {});

struct EquilibriumSearchOptions {
    double tol_eq = 1e-10;     // |b| threshold at a root
    double tol_lambda = 1e-8;  // eigenvalue real-part threshold for classification
    double tol_dedup = 1e-6;   // merge radius, relative to box diameter
    int max_newton_iters = 60;
};

/// Newton refinement from grid seeds; non-converging seeds are skipped, roots
/// deduplicated, classified by the eigenvalues of the Jacobian.
std::vector<Equilibrium> find_equilibria(const FlowField& f, const Box& search_box, const GridSpec& seeds,
                                         const EquilibriumSearchOptions& opts = {});

/// Classifies a known root by its Jacobian eigenvalues.
Equilibrium classify_equilibrium(const FlowField& f, const Vec& location, double tol_lambda = 1e-8);

struct FlowlineDistanceOptions {
    double r_loc = 1e-4;   // switch to the linearized tail inside this radius (times scale)
    double t_max = 1e3;
    double scale = 1.0;
    std::optional<Box> basin_box;  // leaving it means "not in basin"
    IntegratorOptions integrator;
};

/// f_s(w): arclength of the flowline from w to the attractor eq, integrated
/// until |x - eq| < r_loc*scale and closed with the linearized tail |x - eq|.
double stable_distance(const FlowField& f, const Equilibrium& eq, const Vec& w,
                       const FlowlineDistanceOptions& opts = {});
/// f_u(w): time-reversed variant for a repellor.
double unstable_distance(const FlowField& f, const Equilibrium& eq, const Vec& w,
                         const FlowlineDistanceOptions& opts = {});

struct InvariantManifolds2d {
    Curve unstable_plus, unstable_minus;  // integrated forward from +/- unstable eigenvector
    Curve stable_plus, stable_minus;      // integrated backward from +/- stable eigenvector
};

struct ManifoldTraceOptions {
    double seed_offset = 1e-6;  // times scale
    double scale = 1.0;
    double t_max = 1e4;
    std::size_t max_nodes = 100000;
    IntegratorOptions integrator;
};

/// Traces the four stable/unstable branches of a 2-D saddle until each has
/// accumulated arc_budget of arclength.
InvariantManifolds2d trace_invariant_manifolds_2d(const FlowField& f, const Equilibrium& saddle,
                                                  double arc_budget, const ManifoldTraceOptions& opts = {});

struct LimitCycleOptions {
    double tol_cycle = 1e-6;
    double min_diameter = 1e-3;  // rejects spirals collapsing into a focus
    double burn_in_fraction = 0.25;
    IntegratorOptions integrator;
};

/// Poincare-section recurrence detection along the forward orbit of seed.
LimitCycleReport detect_limit_cycle(const FlowField& f, const Vec& seed, double t_max,
                                    const LimitCycleOptions& opts = {});

/// First time tau (searched away from 0 in the given direction, |tau| <=
/// t_max) with g(psi(x,tau)) == 0, refined on the integrator's dense output.
/// Returns the crossing time and state.
std::optional<std::pair<double, Vec>> first_flow_crossing(const FlowField& f, const Vec& x,
                                                          const std::function<double(const Vec&)>& g,
                                                          double direction, double t_max,
                                                          const IntegratorOptions& opts = {});

/// |flow(w, t) - eq| convergence helper: integrates until within radius of
/// target (returns time) or gives up at t_max (returns nullopt).
std::optional<double> time_to_reach_ball(const FlowField& f, const Vec& w, const Vec& target, double radius,
                                         double direction, double t_max, const IntegratorOptions& opts = {});

/// Flowline polyline from x0 (direction +1 forward, -1 backward) until
/// arc_budget of arclength is traced.
Curve flowline_curve(const FlowField& f, const Vec& x0, double direction, double arc_budget,
                     const ManifoldTraceOptions& opts = {});

/// Orbit over the time window [0, T] sampled at n_nodes uniform times.
Curve orbit_curve(const FlowField& f, const Vec& x0, double T, std::size_t n_nodes,
                  const IntegratorOptions& opts = {});

} // namespace minact

#endif
