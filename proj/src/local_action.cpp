#include "minact/local_action.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace minact {

const char* to_string(ActionVariant v) {
    switch (v) {
        case ActionVariant::SdeRanders: return "sde_randers";
        case ActionVariant::SdeGeneral: return "sde_general";
        case ActionVariant::Riemannian: return "riemannian";
        case ActionVariant::Agmon: return "agmon";
        default: return "hamiltonian";
    }
}

LocalAction LocalAction::sde_randers(FlowField drift) {
    const int n = drift.dim();
    auto eval = [drift](const Vec& x, const Vec& y) {
        const Vec b = drift.b(x);
        return b.norm() * y.norm() - b.dot(y);
    };
    LocalAction a(ActionVariant::SdeRanders, n, std::move(eval));
    a.drift_ = std::move(drift);
    a.h_zero_ = true;
    return a;
}

LocalAction LocalAction::sde_general(FlowField drift, Hamiltonian::MatrixField A) {
    const int n = drift.dim();
    auto eval = [drift, A](const Vec& x, const Vec& y) {
        Eigen::LLT<Mat> llt(A(x));
        if (llt.info() != Eigen::Success) throw MetricError("sde_general: A(x) not positive definite");
        const Vec b = drift.b(x);
        const Vec Ainv_b = llt.solve(b);
        const Vec Ainv_y = llt.solve(y);
        return std::sqrt(b.dot(Ainv_b) * y.dot(Ainv_y)) - b.dot(Ainv_y);
    };
    LocalAction a(ActionVariant::SdeGeneral, n, std::move(eval));
    a.drift_ = std::move(drift);
    a.h_zero_ = true;
    return a;
}

LocalAction LocalAction::riemannian(int dim, Hamiltonian::MatrixField A) {
    auto eval = [A](const Vec& x, const Vec& y) {
        const Mat Ax = A(x);
        Eigen::LLT<Mat> llt(Ax);
        if (llt.info() != Eigen::Success) throw MetricError("riemannian: A(x) not positive definite");
        return std::sqrt(y.dot(Ax * y));
    };
    return LocalAction(ActionVariant::Riemannian, dim, std::move(eval));
}

LocalAction LocalAction::agmon(int dim, std::function<double(const Vec&)> U) {
    auto eval = [U](const Vec& x, const Vec& y) {
        const double u = U(x);
        if (u < 0.0) throw DomainError("agmon: potential negative at evaluation point");
        return std::sqrt(2.0 * u) * y.norm();
    };
    return LocalAction(ActionVariant::Agmon, dim, std::move(eval));
}

LocalAction LocalAction::hamiltonian(Hamiltonian h) {
    auto hp = std::make_shared<const Hamiltonian>(std::move(h));
    auto eval = [hp](const Vec& x, const Vec& y) { return hamiltonian_local_action(*hp, x, y); };
    LocalAction a(ActionVariant::Hamiltonian, hp->dim(), std::move(eval));
    a.drift_ = natural_drift(*hp);
    a.ham_ = hp;
    a.h_zero_ = hp->h_zero();
    return a;
}

} // namespace minact
