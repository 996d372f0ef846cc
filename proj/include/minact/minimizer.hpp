#ifndef MINACT_MINIMIZER_HPP
#define MINACT_MINIMIZER_HPP

#include <optional>

#include "minact/criteria.hpp"
#include "minact/functional.hpp"

namespace minact {

/// Start/end constraint: a single point, a sphere, or a level set with
/// projection by bisection along the level gradient.
class EndpointSet {
  public:
    static EndpointSet point(Vec p);
    static EndpointSet sphere(Vec center, double radius);
    static EndpointSet level_set(int dim, std::function<double(const Vec&)> f, Vec inside_point);

    int dim() const { return dim_; }
    /// Representative used by seed curves.
    Vec representative() const;
    /// Closest-point projection (exact for points/spheres, bisection toward
    /// the representative for level sets).
    Vec project(const Vec& x) const;
    double distance(const Vec& x) const { return (x - project(x)).norm(); }
    bool is_point() const { return kind_ == Kind::Point; }

  private:
    enum class Kind { Point, Sphere, LevelSet };
    Kind kind_ = Kind::Point;
    int dim_ = 0;
    Vec anchor_;    // the point / sphere center / an interior reference
    double radius_ = 0.0;
    std::function<double(const Vec&)> level_;
};

struct MinimizeProblem {
    LocalAction action;
    EndpointSet start_set, end_set;
    std::size_t nodes = 100;
    Box box;
    std::size_t max_iters = 4000;
    double step0 = 0.1;
    double tol_S = 1e-10;
    double scale = 1.0;
    std::uint64_t seed = 20140906;  // recorded in every report

    void validate() const;
};

struct MinimizeResult {
    ArcCurve curve;
    double action_value = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    std::vector<double> action_history;  // nonincreasing by construction
    bool box_clamp_active = false;       // confinement diagnostic
    std::uint64_t seed = 0;
};

/// Straight segment between set representatives; with a field whose
/// equilibria include a saddle, a heteroclinic seed routed through the
/// saddle nearest to the segment.
Curve seed_curve(const MinimizeProblem& p, const FlowField* field = nullptr);

/// Relaxation of the discretized action: finite-difference node gradient,
/// backtracking line search, arclength redistribution every iteration,
/// endpoint projection and box clamping.
MinimizeResult minimize(const MinimizeProblem& p, std::optional<Curve> initial = std::nullopt,
                        par::Mode mode = par::mode());

/// The sheared family phi_eps(alpha) = phi(alpha) + eps (alpha - alpha0)
/// b(phi(alpha)) applied nodewise on the arclength parameter for
/// alpha >= alpha0.
Curve bend_end_family(const ArcCurve& c, const FlowField& f, double alpha0, double eps);

/// Central finite difference of eps -> S(bent curve) at eps = 0; negative
/// whenever the end segment can profitably be sheared toward the drift.
double descent_derivative(const ArcCurve& c, const LocalAction& a, const FlowField& f, double alpha0,
                          double eps = 1e-4);

struct HittingReport {
    bool crossed = false;
    std::size_t first_index = 0, last_index = 0;
    Vec first_hit, last_hit;
    double first_dist_to_crit = 0.0, last_dist_to_crit = 0.0;
    bool pass = false;
    double downhill_action = 0.0;  // action of the segment after the last hit
    double total_action = 0.0;
};

struct HittingOptions {
    double pass_tol = 0.05;
    std::optional<double> dist_tol;  // default: grows with the node spacing
};

/// First and last nodes of the minimizer near the separatrix polyline and
/// their distances to the nearest critical point.
HittingReport hitting_report(const MinimizeResult& r, const FlowField& f, const Curve& separatrix,
                             const std::vector<Vec>& crit_points, const LocalAction& action,
                             const HittingOptions& opts = {});

/// Signed total turning of a planar curve around a center, in revolutions.
/// A non-converged minimization toward a cycle paired with persistent
/// winding is the reported signature of a suspected non-existent minimizer.
double winding_number(const Curve& c, const Vec& center);

} // namespace minact

#endif
