#ifndef MINACT_LOCAL_ACTION_HPP
#define MINACT_LOCAL_ACTION_HPP

#include <memory>
#include <optional>
#include <string>

#include "minact/hamiltonian.hpp"

namespace minact {

enum class ActionVariant { SdeRanders, SdeGeneral, Riemannian, Agmon, Hamiltonian };

const char* to_string(ActionVariant v);

/// Local action l(x,y): nonnegative, positively 1-homogeneous and convex in
/// y. Closed-form variants plus the Hamiltonian-backed one. Evaluators are
/// pure; copies share the underlying parameter functions.
class LocalAction {
  public:
    /// l = |b||y| - <b,y>
    static LocalAction sde_randers(FlowField drift);
    /// l = |b|_{A^-1} |y|_{A^-1} - <b,y>_{A^-1}
    static LocalAction sde_general(FlowField drift, Hamiltonian::MatrixField A);
    /// l = |y|_{g_x} with <.,.>_{g_x} = <., A(x) .>
    static LocalAction riemannian(int dim, Hamiltonian::MatrixField A);
    /// l = sqrt(2 U(x)) |y|
    static LocalAction agmon(int dim, std::function<double(const Vec&)> U);
    /// l = <y, theta_hat(x,y)> through solve_theta
    static LocalAction hamiltonian(Hamiltonian h);

    double operator()(const Vec& x, const Vec& y) const { return eval_(x, y); }

    ActionVariant variant() const { return variant_; }
    int dim() const { return dim_; }

    /// Drift this action vanishes along, when one is available (the SDE
    /// variants carry their b; the Hamiltonian variant its natural drift).
    const FlowField* drift() const { return drift_ ? &*drift_ : nullptr; }

    /// Hamiltonian backing, when present.
    const Hamiltonian* hamiltonian_backing() const { return ham_ ? ham_.get() : nullptr; }

    /// H(x,0) == 0 family with smooth data; the subclass the flowline
    /// zero-cost and limit-cycle non-existence statements apply to.
    bool h_zero_class() const { return h_zero_; }

  private:
    using EvalFn = std::function<double(const Vec&, const Vec&)>;

    LocalAction(ActionVariant v, int dim, EvalFn eval) : variant_(v), dim_(dim), eval_(std::move(eval)) {}

    ActionVariant variant_;
    int dim_;
    EvalFn eval_;
    std::optional<FlowField> drift_;
    std::shared_ptr<const Hamiltonian> ham_;
    bool h_zero_ = false;
};

} // namespace minact

#endif
