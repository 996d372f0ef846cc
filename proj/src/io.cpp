#include "minact/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace minact {

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

void write_curve_csv(std::ostream& os, const ArcCurve& c) {
    if (c.nodes.empty()) throw InvalidCurveError("cannot write an empty curve");
    const int n = static_cast<int>(c.nodes.front().size());
    os << "i";
    for (int d = 1; d <= n; ++d) os << ",x" << d;
    os << ",s\n";
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        os << i;
        for (int d = 0; d < n; ++d) os << "," << format_double(c.nodes[i][d]);
        os << "," << format_double(c.cumulative_length[i]) << "\n";
    }
}

void write_curve_csv(const std::string& path, const ArcCurve& c) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    write_curve_csv(os, c);
}

Curve read_curve_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("curve CSV: empty file");
    // header i,x1,...,xn,s
    int n = 0;
    {
        std::stringstream ss(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (cols.size() < 3 || cols.front() != "i" || cols.back() != "s")
            throw ConfigError("curve CSV: header must be i,x1,...,xn,s");
        n = static_cast<int>(cols.size()) - 2;
    }
    std::vector<Vec> nodes;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (static_cast<int>(cols.size()) != n + 2)
            throw ConfigError("curve CSV: wrong column count on line " + std::to_string(lineno));
        Vec x(n);
        for (int d = 0; d < n; ++d) {
            try {
                x[d] = std::stod(cols[d + 1]);
            } catch (const std::exception&) {
                throw ConfigError("curve CSV: bad number on line " + std::to_string(lineno));
            }
        }
        nodes.push_back(std::move(x));
    }
    if (nodes.size() < 2) throw ConfigError("curve CSV: need at least 2 nodes");
    return Curve(std::move(nodes));
}

Curve read_curve_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open curve CSV: " + path);
    return read_curve_csv(is);
}

Json to_json(const Vec& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json to_json(const BoundReport& r) {
    Json j;
    j["value"] = r.value;
    j["bound"] = r.bound;
    j["margin"] = r.margin;
    Json w;
    w["x"] = r.worst_x.size() ? to_json(r.worst_x) : Json::array();
    w["y"] = r.worst_y.size() ? to_json(r.worst_y) : Json::array();
    j["worst_sample"] = w;
    j["violations"] = r.violations;
    j["samples"] = r.samples;
    return j;
}

Json to_json(const KeyEstimateResult& r) {
    Json j;
    j["value"] = r.lhs;
    j["bound"] = r.rhs;
    j["margin"] = r.rhs + r.slack - r.lhs;
    j["action"] = r.action;
    j["delta_term"] = r.delta_term;
    j["holds"] = r.holds;
    j["slack"] = r.slack;
    j["clamp_branch_hits"] = r.clamp_branch_hits;
    return j;
}

Json to_json(const CriteriaVerdict& v) {
    Json j;
    j["point"] = to_json(v.point);
    j["verdict"] = to_string(v.verdict);
    j["criterion"] = to_string(v.criterion);
    j["margin"] = v.margin;
    if (v.manifold_id >= 0) {
        j["manifold_id"] = v.manifold_id;
        j["crossing_time"] = v.crossing_time;
    }
    if (v.eigenvalues.size() > 0) {
        Json ev = Json::array();
        for (int i = 0; i < v.eigenvalues.size(); ++i)
            ev.push_back(Json::array({v.eigenvalues[i].real(), v.eigenvalues[i].imag()}));
        j["eigenvalues"] = ev;
    }
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

Json to_json(const std::vector<CriteriaVerdict>& verdicts) {
    Json a = Json::array();
    for (const auto& v : verdicts) a.push_back(to_json(v));
    return a;
}

Json minimize_sidecar(const MinimizeResult& r, const MinimizeProblem& p) {
    Json j;
    j["action"] = r.action_value;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["seed"] = r.seed;
    Json params;
    params["nodes"] = p.nodes;
    params["max_iters"] = p.max_iters;
    params["step0"] = p.step0;
    params["tol_S"] = p.tol_S;
    params["variant"] = to_string(p.action.variant());
    params["box_clamp_active"] = r.box_clamp_active;
    j["parameters"] = params;
    return j;
}

void write_verdict_csv(std::ostream& os, const std::vector<CriteriaVerdict>& verdicts, int dim) {
    os << "i";
    for (int d = 1; d <= dim; ++d) os << ",x" << d;
    os << ",verdict,criterion,margin\n";
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const auto& v = verdicts[i];
        os << i;
        for (int d = 0; d < dim; ++d) os << "," << format_double(v.point[d]);
        os << "," << to_string(v.verdict) << "," << to_string(v.criterion) << ","
           << format_double(v.margin) << "\n";
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    os << content;
}

} // namespace minact
