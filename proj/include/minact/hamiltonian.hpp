#ifndef MINACT_HAMILTONIAN_HPP
#define MINACT_HAMILTONIAN_HPP

#include <functional>
#include <optional>

#include "minact/flow_field.hpp"
#include "minact/types.hpp"

namespace minact {

/// Hamiltonian H(x, theta) with its theta-derivatives. The induced local
/// action is l(x,y) = max{ <y,theta> : H(x,theta) <= 0 }, computed through
/// the root system H_theta = lambda*y, H = 0 (solve_theta below).
///
/// Required structure: H(x,0) <= 0 everywhere, H_theta/H_thetatheta
/// continuous, and H strictly convex in theta on compacts. h_zero marks
/// Hamiltonians with H(x,0) == 0 identically (the class whose natural-drift
/// flowlines cost nothing); smooth members of that class form the family to
/// which the limit-cycle non-existence results apply.
class Hamiltonian {
  public:
    using ScalarFn = std::function<double(const Vec&, const Vec&)>;
    using VecFn = std::function<Vec(const Vec&, const Vec&)>;
    using MatFn = std::function<Mat(const Vec&, const Vec&)>;
    /// x-dependent matrix field, e.g. a diffusion or metric A(x)
    using MatrixField = std::function<Mat(const Vec&)>;

    Hamiltonian(int dim, ScalarFn H, VecFn H_theta, MatFn H_thetatheta, bool h_zero);

    int dim() const { return dim_; }
    double H(const Vec& x, const Vec& theta) const { return H_(x, theta); }
    Vec H_theta(const Vec& x, const Vec& theta) const { return Ht_(x, theta); }
    Mat H_thetatheta(const Vec& x, const Vec& theta) const { return Htt_(x, theta); }

    bool has_H_x() const { return static_cast<bool>(Hx_); }
    Vec H_x(const Vec& x, const Vec& theta) const;
    void set_H_x(VecFn Hx) { Hx_ = std::move(Hx); }

    /// H(x,0) == 0 identically (declared by the builder).
    bool h_zero() const { return h_zero_; }

  private:
    int dim_;
    ScalarFn H_;
    VecFn Ht_;
    MatFn Htt_;
    VecFn Hx_;
    bool h_zero_;
};

/// Sampled verification of the structural assumptions on a box: H(x,0) <= tol,
/// strict convexity in theta (miniumum sampled directional curvature), and
/// finite-difference consistency of H_theta with H.
struct HamiltonianCheckReport {
    bool h1_ok = false;
    bool h1_strict = false;  // |H(x,0)| <= tol at every sample
    double max_h_at_zero = 0.0;
    double min_curvature = 0.0;  // sampled m_K from directional second differences
    double max_gradient_mismatch = 0.0;
    double max_hessian_mismatch = 0.0;
    bool pass = false;
};

HamiltonianCheckReport check_hamiltonian(const Hamiltonian& h, const Box& K, int samples = 64,
                                         std::uint64_t seed = 17, double tol = 1e-7);

/// Solution of H_theta(x, theta) = lambda * y, H(x, theta) = 0, lambda >= 0.
struct ThetaSolution {
    Vec theta_hat;
    double lambda = 0.0;
    double residual = 0.0;
};

struct ThetaSolveOptions {
    double tol_root = 1e-12;
    int max_iters = 80;
    int restarts = 8;
    double tol_crit = 1e-9;
};

/// Newton iteration on the (n+1)-dimensional root system. At critical points
/// the solution is theta = 0, lambda = 0. Throws SolverFailureError (carrying
/// the best residual) if no start converges.
ThetaSolution solve_theta(const Hamiltonian& h, const Vec& x, const Vec& y,
                          const ThetaSolveOptions& opts = {});

/// l(x,y) = <y, theta_hat(x,y)>, and 0 at y = 0.
double hamiltonian_local_action(const Hamiltonian& h, const Vec& x, const Vec& y,
                                const ThetaSolveOptions& opts = {});

/// b(x) := H_theta(x, 0), Jacobian by finite differences of b.
FlowField natural_drift(const Hamiltonian& h);

/// Drift constant A = [2 + sup{|H_thetatheta(x,theta)| : x in K, |theta| <= a}]^-1
/// with a = sup_K |b|, estimated over the sample grid; always in (0, 1/2].
double drift_constant(const Hamiltonian& h, const Box& K, const GridSpec& samples,
                      int theta_directions = 32);

/// True iff |H(x,0)| and |H_theta(x,0)| both fall below tol_crit.
bool is_critical_point(const Hamiltonian& h, const Vec& x, double tol_crit = 1e-9);
/// Distance-to-criticality diagnostic: max(|H(x,0)|, |H_theta(x,0)|).
double critical_point_margin(const Hamiltonian& h, const Vec& x);

/// Legendre transform L(x,y) = sup_theta <y,theta> - H(x,theta), by Newton
/// on H_theta(x,theta) = y.
double legendre_lagrangian(const Hamiltonian& h, const Vec& x, const Vec& y,
                           const ThetaSolveOptions& opts = {});

// Built-in Hamiltonian families.

/// H = <b, theta> + 1/2 <theta, A theta> (SDE large-deviation form); A must
/// be pointwise symmetric positive definite.
Hamiltonian sde_hamiltonian(const FlowField& drift, Hamiltonian::MatrixField A = {});

struct JumpProcess {
    std::vector<std::function<double(const Vec&)>> rates;
    std::vector<Vec> jumps;
};

/// H = sum_i nu_i(x) (exp(<e_i, theta>) - 1) (Markov jump process form).
Hamiltonian markov_jump_hamiltonian(int dim, JumpProcess process);

/// H = |theta|^2 with respect to A(x)^-1, minus 1; induces l = |y|_{A(x)}.
Hamiltonian riemannian_hamiltonian(int dim, Hamiltonian::MatrixField A);

/// H = 1/2 |theta|^2 - U(x); induces l = sqrt(2 U(x)) |y|.
Hamiltonian agmon_hamiltonian(int dim, std::function<double(const Vec&)> U);

} // namespace minact

#endif
