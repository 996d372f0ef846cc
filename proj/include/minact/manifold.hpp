#ifndef MINACT_MANIFOLD_HPP
#define MINACT_MANIFOLD_HPP

#include <functional>
#include <optional>
#include <string>

#include "minact/functional.hpp"

namespace minact {

/// Level-set representation of a candidate admissible manifold
/// M = f_M^{-1}({0}); never a mesh. The stored orientation sign (set by
/// check_admissible) normalizes f_M so that the drift crosses M from
/// negative to positive values.
class AdmissibleManifold {
  public:
    using LevelFn = std::function<double(const Vec&)>;
    using GradFn = std::function<Vec(const Vec&)>;

    AdmissibleManifold(int dim, LevelFn f, Box bounding_box);
    AdmissibleManifold(int dim, LevelFn f, GradFn grad, Box bounding_box);

    int dim() const { return dim_; }
    const Box& bounding_box() const { return box_; }

    /// Oriented level value.
    double level(const Vec& x) const { return orientation_ * f_(x); }
    Vec gradient(const Vec& x) const;

    double orientation() const { return orientation_; }
    void set_orientation(double s);

  private:
    int dim_;
    LevelFn f_;
    GradFn grad_;
    Box box_;
    double orientation_ = 1.0;
    double h_grad_ = 1e-7;
};

struct AdmissibilityReport {
    bool pass = false;
    double orientation = 1.0;  // sign of f_M that passed (or was tried last)
    std::size_t points_checked = 0;
    double min_alignment = 0.0;  // min of <grad f, b>/(|grad f||b|) at zero-set samples
    bool zero_set_contained = true;
    std::vector<Vec> zero_points;
    std::vector<double> alignments;
    /// two sampled crossings with opposite drift alignment, when the
    /// manifold is crossed in both directions (the failure certificate)
    std::optional<std::pair<std::size_t, std::size_t>> sign_flip_pair;
    std::string failure;
};

struct AdmissibilityOptions {
    double tol_angle = 1e-6;
    std::uint64_t seed = 7;
    int boundary_samples = 128;  // per check that the zero set stays inside the box
};

/// Samples zero-set points by bisection along random segments in the
/// bounding box, checks grad f != 0 and a uniform crossing direction
/// (trying both orientations of f_M), and that the zero set stays inside
/// the box. Throws EmptyManifoldError when no zero-set point exists.
/// On success the manifold's orientation is fixed to the passing sign.
AdmissibilityReport check_admissible(AdmissibleManifold& m, const FlowField& f, std::size_t samples,
                                     const AdmissibilityOptions& opts = {});

struct FlowCoordinates {
    Vec z;       // point on the manifold
    double t;    // flow time with psi(z, t) = x; sign(t) = sign(f_M(x))
    double arclength;  // |signed arclength| from z to x along the flowline
};

struct FlowCoordinateOptions {
    double t_max = 1e3;
    double level_tol = 1e-10;
    IntegratorOptions integrator;
};

/// Unique manifold point and flow time reaching x, by integrating against
/// the level sign and bisecting the crossing; the crossing is polished until
/// |f_M(z)| < level_tol. Throws NotReachableError when no crossing occurs
/// within t_max.
FlowCoordinates flow_coordinates(const AdmissibleManifold& m, const FlowField& f, const Vec& x,
                                 const FlowCoordinateOptions& opts = {});

/// min(max(a, q1), q2)
double clamp_to(double q1, double q2, double a);

struct TracingSamplingOptions {
    std::size_t samples = 10000;  // quasi-random candidates in the box
    double fd_step = 1e-5;
    FlowCoordinateOptions flow;
};

/// Scalar field tracing the drift flowlines between two values: |<grad f, b>|
/// = |b| on E = f^{-1}((q1,q2)). Carries the sampled estimates of
/// H = sup_E |grad f| and G = min_closure(E) |b| used by the key estimate.
class TracingFunction {
  public:
    double operator()(const Vec& x) const { return eval_(x, nullptr); }
    /// outside_domain (optional) is set when the evaluation fell back to the
    /// clamp branch, i.e. x was not connected to the manifold by a flowline
    /// within the time budget and membership was approximated by the level
    /// sign.
    double eval(const Vec& x, bool* outside_domain) const { return eval_(x, outside_domain); }

    double q1() const { return q1_; }
    double q2() const { return q2_; }
    double grad_bound() const { return grad_bound_; }
    double min_drift() const { return min_drift_; }
    int dim() const { return dim_; }
    const std::string& kind() const { return kind_; }

    using SamplingOptions = TracingSamplingOptions;

    /// Signed flowline arclength from the manifold, clamped to +-2*eps away
    /// from it; traces b between -eps and eps.
    static TracingFunction from_manifold(const AdmissibleManifold& m, const FlowField& f, double eps,
                                         const SamplingOptions& opts = {});

    /// f1(w) = min(f_s(w), eps) for an attractor (f_u for a repellor),
    /// clamped to eps outside the basin; traces b between 0 and eps.
    static TracingFunction from_equilibrium(const FlowField& f, const Equilibrium& eq, double eps,
                                            const Box& sample_box, const FlowlineDistanceOptions& dist = {},
                                            const SamplingOptions& opts = {});

    /// Wraps a user-supplied tracing function; H and G are estimated by
    /// sampling E inside the box.
    static TracingFunction from_function(int dim, std::function<double(const Vec&)> fn, double q1, double q2,
                                         const FlowField& f, const Box& sample_box,
                                         const SamplingOptions& opts = {});

  private:
    TracingFunction() = default;

    std::function<double(const Vec&, bool*)> eval_;
    double q1_ = 0.0, q2_ = 0.0;
    double grad_bound_ = 0.0;
    double min_drift_ = 0.0;
    int dim_ = 0;
    std::string kind_;
};

struct KeyEstimateResult {
    double lhs = 0.0;       // length of the curve restricted to E
    double rhs = 0.0;       // (2 H^2/(A G)) S + 2 |clamped level difference|
    double action = 0.0;    // S(c)
    double delta_term = 0.0;
    bool holds = false;     // lhs <= rhs + slack
    double slack = 0.0;
    std::size_t clamp_branch_hits = 0;  // evaluations outside the traced region
};

/// Both sides of the length-vs-action estimate on a discrete curve;
/// slack covers the chord-midpoint classification error.
KeyEstimateResult key_estimate_bound(const TracingFunction& t, const LocalAction& a, double A_const,
                                     const Curve& c, double slack = 1e-6);

struct EvolvedManifold {
    AdmissibleManifold manifold;
    AdmissibilityReport report;
};

/// Pushes the manifold along the flow of beta*b for time T:
/// f_{M'}(x) = f_M(psi_beta(x, -T)); the result is re-checked.
EvolvedManifold evolve_manifold(const AdmissibleManifold& m, const FlowField& f,
                                const std::function<double(const Vec&)>& beta, double T,
                                std::size_t check_samples = 64, const IntegratorOptions& iopts = {});

} // namespace minact

#endif
