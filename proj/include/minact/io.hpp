#ifndef MINACT_IO_HPP
#define MINACT_IO_HPP

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "minact/criteria.hpp"
#include "minact/curve.hpp"
#include "minact/functional.hpp"
#include "minact/minimizer.hpp"

namespace minact {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; deterministic for a given value.
std::string format_double(double v);

// Curve CSV: header "i,x1,...,xn,s" with s the cumulative arclength; one
// node per row, UTF-8, LF line endings.
void write_curve_csv(std::ostream& os, const ArcCurve& c);
void write_curve_csv(const std::string& path, const ArcCurve& c);
Curve read_curve_csv(std::istream& is);
Curve read_curve_csv(const std::string& path);

Json to_json(const Vec& v);
Json to_json(const BoundReport& r);
Json to_json(const KeyEstimateResult& r);
Json to_json(const CriteriaVerdict& v);
Json to_json(const std::vector<CriteriaVerdict>& verdicts);

/// Minimizer sidecar: {action, iterations, converged, seed, parameters}.
Json minimize_sidecar(const MinimizeResult& r, const MinimizeProblem& p);

/// Verdict CSV rows: point coordinates, verdict, criterion, margin.
void write_verdict_csv(std::ostream& os, const std::vector<CriteriaVerdict>& verdicts, int dim);

void write_text_file(const std::string& path, const std::string& content);

} // namespace minact

#endif
