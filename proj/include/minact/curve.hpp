#ifndef MINACT_CURVE_HPP
#define MINACT_CURVE_HPP

#include <functional>
#include <vector>

#include "minact/types.hpp"

namespace minact {

/// Polyline sample of an unparameterized oriented curve in R^n. Orientation
/// is the node order; all integrals over curves are chord sums evaluated at
/// chord midpoints.
struct Curve {
    std::vector<Vec> nodes;

    Curve() = default;
    explicit Curve(std::vector<Vec> nodes_);

    int dim() const { return nodes.empty() ? 0 : static_cast<int>(nodes.front().size()); }
    std::size_t size() const { return nodes.size(); }
    const Vec& front() const { return nodes.front(); }
    const Vec& back() const { return nodes.back(); }

    /// Throws InvalidCurveError on mixed dimensions or fewer than 2 nodes.
    void validate() const;
};

/// Curve with equal chord spacing, the discrete arclength parameterization.
/// cumulative_length[i] is the arclength from the first node to node i.
struct ArcCurve {
    std::vector<Vec> nodes;
    std::vector<double> cumulative_length;

    double total_length() const { return cumulative_length.empty() ? 0.0 : cumulative_length.back(); }
    Curve as_curve() const { return Curve(nodes); }
};

using PointPredicate = std::function<bool(const Vec&)>;

/// Total polyline length (sum of chord lengths).
double curve_length(const Curve& c);

/// Resamples the polyline of c at m nodes with equal chord spacing;
/// endpoints are preserved exactly. Throws DegenerateCurveError for
/// zero-length curves.
ArcCurve reparameterize_arclength(const Curve& c, std::size_t m);

/// Length of the part of c inside the set given by the predicate; chords are
/// classified by their midpoints.
double restricted_length(const Curve& c, const PointPredicate& in_set);

/// Joins a and b, dropping the duplicated junction node. The last node of a
/// must equal the first node of b within tol.
Curve concat(const Curve& a, const Curve& b, double tol = 1e-9);

/// Orientation flip.
Curve reverse(const Curve& c);

} // namespace minact

#endif
