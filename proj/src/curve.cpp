#include "minact/curve.hpp"

#include <algorithm>
#include <cmath>

namespace minact {

Curve::Curve(std::vector<Vec> nodes_) : nodes(std::move(nodes_)) { validate(); }

void Curve::validate() const {
    if (nodes.size() < 2) throw InvalidCurveError("curve needs at least 2 nodes");
    const auto n = nodes.front().size();
    for (const Vec& p : nodes) {
        if (p.size() != n) throw InvalidCurveError("curve nodes have mixed dimensions");
        if (!p.allFinite()) throw InvalidCurveError("curve node has non-finite coordinate");
    }
}

double curve_length(const Curve& c) {
    c.validate();
    const std::size_t m = c.nodes.size() - 1;
    std::vector<double> chord(m);
    for (std::size_t i = 0; i < m; ++i) chord[i] = (c.nodes[i + 1] - c.nodes[i]).norm();
    // symmetric fold: invariant under orientation reversal, so
    // curve_length(reverse(c)) == curve_length(c) holds exactly
    double s = 0.0;
    for (std::size_t k = 0; k < m / 2; ++k) s += chord[k] + chord[m - 1 - k];
    if (m % 2 == 1) s += chord[m / 2];
    return s;
}

ArcCurve reparameterize_arclength(const Curve& c, std::size_t m) {
    c.validate();
    if (m < 2) throw ConfigError("reparameterize_arclength needs m >= 2");

    std::vector<double> cum(c.nodes.size(), 0.0);
    for (std::size_t i = 1; i < c.nodes.size(); ++i)
        cum[i] = cum[i - 1] + (c.nodes[i] - c.nodes[i - 1]).norm();
    const double total = cum.back();
    if (total <= 0.0) throw DegenerateCurveError("cannot arclength-parameterize a zero-length curve");

    ArcCurve out;
    out.nodes.reserve(m);
    out.cumulative_length.reserve(m);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double s = total * static_cast<double>(k) / static_cast<double>(m - 1);
        if (k == 0) {
            out.nodes.push_back(c.nodes.front());
        } else if (k == m - 1) {
            out.nodes.push_back(c.nodes.back());
        } else {
            while (seg + 2 < c.nodes.size() && cum[seg + 1] < s) ++seg;
            const double ds = cum[seg + 1] - cum[seg];
            const double w = ds > 0.0 ? (s - cum[seg]) / ds : 0.0;
            out.nodes.push_back(c.nodes[seg] + w * (c.nodes[seg + 1] - c.nodes[seg]));
        }
        out.cumulative_length.push_back(s);
    }
    return out;
}

double restricted_length(const Curve& c, const PointPredicate& in_set) {
    c.validate();
    double s = 0.0;
    for (std::size_t i = 1; i < c.nodes.size(); ++i) {
        const Vec mid = 0.5 * (c.nodes[i] + c.nodes[i - 1]);
        if (in_set(mid)) s += (c.nodes[i] - c.nodes[i - 1]).norm();
    }
    return s;
}

Curve concat(const Curve& a, const Curve& b, double tol) {
    a.validate();
    b.validate();
    if (a.dim() != b.dim()) throw InvalidCurveError("concat: dimension mismatch");
    if ((a.back() - b.front()).norm() > tol)
        throw EndpointMismatchError("concat: junction nodes differ by more than tolerance");
    Curve out;
    out.nodes = a.nodes;
    out.nodes.insert(out.nodes.end(), b.nodes.begin() + 1, b.nodes.end());
    return out;
}

Curve reverse(const Curve& c) {
    c.validate();
    Curve out = c;
    std::reverse(out.nodes.begin(), out.nodes.end());
    return out;
}

} // namespace minact
