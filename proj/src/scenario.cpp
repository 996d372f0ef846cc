#include "minact/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace minact {

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

struct Section {
    std::string name;
    int line = 0;
    std::vector<std::pair<std::string, Entry>> entries;

    const Entry* find(const std::string& key) const {
        for (const auto& [k, e] : entries)
            if (k == key) return &e;
        return nullptr;
    }
    std::vector<const Entry*> find_all(const std::string& key) const {
        std::vector<const Entry*> out;
        for (const auto& [k, e] : entries)
            if (k == key) out.push_back(&e);
        return out;
    }
};

[[noreturn]] void fail(const std::string& what, int line) {
    throw ConfigError("scenario config, line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<Section> tokenize(const std::string& text) {
    std::vector<Section> sections;
    sections.push_back({"", 0, {}});  // top-level pseudo-section
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto pos = line.find('#'); pos != std::string::npos) line = line.substr(0, pos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header", lineno);
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) fail("empty section name", lineno);
            sections.push_back({name, lineno, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail("empty key", lineno);
        sections.back().entries.push_back({key, {value, lineno}});
    }
    return sections;
}

double parse_number(const Entry& e) {
    try {
        std::size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (trim(e.value.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail("expected a number, got '" + e.value + "'", e.line);
}

std::uint64_t parse_u64(const Entry& e) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(e.value, &used);
        if (trim(e.value.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    fail("expected an unsigned integer, got '" + e.value + "'", e.line);
}

std::vector<double> parse_number_list(const Entry& e) {
    std::vector<double> out;
    std::istringstream is(e.value);
    std::string tok;
    while (is >> tok) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (!trim(tok.substr(used)).empty()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            fail("expected numbers, got '" + e.value + "'", e.line);
        }
    }
    if (out.empty()) fail("expected numbers, got empty value", e.line);
    return out;
}

Vec parse_vec(const Entry& e, int dim) {
    const auto xs = parse_number_list(e);
    if (static_cast<int>(xs.size()) != dim)
        fail("expected " + std::to_string(dim) + " coordinates, got " + std::to_string(xs.size()), e.line);
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = xs[static_cast<std::size_t>(i)];
    return v;
}

Box parse_box(const Entry& e, int dim) {
    const auto xs = parse_number_list(e);
    if (static_cast<int>(xs.size()) != 2 * dim)
        fail("box needs " + std::to_string(2 * dim) + " numbers (lo..., hi...)", e.line);
    Vec lo(dim), hi(dim);
    for (int i = 0; i < dim; ++i) {
        lo[i] = xs[static_cast<std::size_t>(i)];
        hi[i] = xs[static_cast<std::size_t>(dim + i)];
    }
    try {
        return Box(lo, hi);
    } catch (const ConfigError& err) {
        fail(err.what(), e.line);
    }
}

void reject_unknown(const Section& s, std::initializer_list<const char*> known) {
    for (const auto& [k, e] : s.entries) {
        bool ok = false;
        for (const char* kk : known)
            if (k == kk) ok = true;
        if (!ok) fail("unknown key '" + k + "' in section [" + s.name + "]", e.line);
    }
}

std::map<std::string, std::string> entries_as_params(const Section& s) {
    std::map<std::string, std::string> m;
    for (const auto& [k, e] : s.entries) {
        if (m.count(k)) m[k] += ";" + e.value;  // repeated keys joined
        else m[k] = e.value;
    }
    return m;
}

// JSON documents are flattened into the sectioned text form so both formats
// share one code path (arrays of objects become repeated sections)
std::string json_to_config_text(const nlohmann::json& j) {
    std::ostringstream os;
    auto value_str = [](const nlohmann::json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_array()) {
            std::string s;
            for (const auto& x : v) {
                if (!s.empty()) s += " ";
                s += x.is_string() ? x.get<std::string>() : x.dump();
            }
            return s;
        }
        return v.dump();
    };
    auto emit_section = [&](const std::string& name, const nlohmann::json& obj) {
        os << "[" << name << "]\n";
        for (const auto& [k, v] : obj.items()) os << k << " = " << value_str(v) << "\n";
    };
    // scalars first: they are top-level keys and must precede any section
    for (const auto& [key, v] : j.items()) {
        if (v.is_object() || (v.is_array() && !v.empty() && v.front().is_object())) continue;
        os << key << " = " << value_str(v) << "\n";
    }
    for (const auto& [key, v] : j.items()) {
        if (v.is_object()) {
            emit_section(key, v);
        } else if (v.is_array() && !v.empty() && v.front().is_object()) {
            const std::string section = key == "manifolds" ? "manifold" : key;
            for (const auto& o : v) emit_section(section, o);
        }
    }
    return os.str();
}

} // namespace

bool field_has_potential(const std::string& name) {
    return name == "double_well" || name == "triple_well" || name == "linear_radial";
}

std::function<double(const Vec&)> make_potential(const std::string& name, int dim) {
    if (name == "double_well") {
        if (dim != 2) throw ConfigError("potential double_well is two-dimensional");
        return [](const Vec& x) {
            const double a = x[0] * x[0] - 1.0;
            return 0.25 * a * a + 0.5 * x[1] * x[1];
        };
    }
    if (name == "triple_well") {
        if (dim != 2) throw ConfigError("potential triple_well is two-dimensional");
        return [](const Vec& x) {
            const double u = x[0];
            return u * u * u * u * u * u / 6.0 - 1.25 * u * u * u * u + 2.0 * u * u +
                   0.5 * x[1] * x[1];
        };
    }
    if (name == "quadratic") {
        return [](const Vec& x) { return 0.5 * x.squaredNorm(); };
    }
    if (name == "linear_radial") {
        return [](const Vec& x) { return 0.5 * x.squaredNorm(); };
    }
    throw ConfigError("unknown potential '" + name + "'");
}

FlowField make_field(const std::string& name, const std::map<std::string, std::string>& params, int dim) {
    auto param_vec = [&](const std::string& key) -> std::optional<std::vector<double>> {
        auto it = params.find(key);
        if (it == params.end()) return std::nullopt;
        std::vector<double> xs;
        std::istringstream is(it->second);
        double v;
        while (is >> v) xs.push_back(v);
        return xs;
    };

    if (name == "double_well") {
        if (dim != 2) throw ConfigError("field double_well is two-dimensional");
        auto b = [](const Vec& x) {
            Vec v(2);
            v << x[0] - x[0] * x[0] * x[0], -x[1];
            return v;
        };
        auto jac = [](const Vec& x) {
            Mat J(2, 2);
            J << 1.0 - 3.0 * x[0] * x[0], 0.0, 0.0, -1.0;
            return J;
        };
        return FlowField(2, b, jac);
    }
    if (name == "triple_well") {
        if (dim != 2) throw ConfigError("field triple_well is two-dimensional");
        auto b = [](const Vec& x) {
            const double u = x[0];
            Vec v(2);
            v << -(u * u * u * u * u - 5.0 * u * u * u + 4.0 * u), -x[1];
            return v;
        };
        auto jac = [](const Vec& x) {
            const double u = x[0];
            Mat J(2, 2);
            J << -(5.0 * u * u * u * u - 15.0 * u * u + 4.0), 0.0, 0.0, -1.0;
            return J;
        };
        return FlowField(2, b, jac);
    }
    if (name == "constant") {
        auto bv = param_vec("b");
        if (!bv || static_cast<int>(bv->size()) != dim)
            throw ConfigError("field constant needs parameter 'b' with dim entries");
        Vec b0(dim);
        for (int i = 0; i < dim; ++i) b0[i] = (*bv)[static_cast<std::size_t>(i)];
        return FlowField(
            dim, [b0](const Vec&) { return b0; },
            [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); });
    }
    if (name == "linear_radial") {
        double k = 1.0;
        if (auto kv = param_vec("k"); kv && kv->size() == 1) k = (*kv)[0];
        return FlowField(
            dim, [k](const Vec& x) { return Vec(-k * x); },
            [k, dim](const Vec&) { return Mat(-k * Mat::Identity(dim, dim)); });
    }
    if (name == "limit_cycle") {
        if (dim != 2) throw ConfigError("field limit_cycle is two-dimensional");
        auto b = [](const Vec& x) {
            const double r2 = x.squaredNorm();
            Vec v(2);
            v << x[1] + x[0] * (1.0 - r2), -x[0] + x[1] * (1.0 - r2);
            return v;
        };
        auto jac = [](const Vec& x) {
            const double r2 = x.squaredNorm();
            Mat J(2, 2);
            J << 1.0 - r2 - 2.0 * x[0] * x[0], 1.0 - 2.0 * x[0] * x[1], -1.0 - 2.0 * x[0] * x[1],
                1.0 - r2 - 2.0 * x[1] * x[1];
            return J;
        };
        return FlowField(2, b, jac);
    }
    if (name == "birth_death_1d") {
        if (dim != 1) throw ConfigError("field birth_death_1d is one-dimensional");
        return FlowField(
            1, [](const Vec& x) { return Vec(Vec::Constant(1, 1.0 - x[0])); },
            [](const Vec&) { return Mat(Mat::Constant(1, 1, -1.0)); });
    }
    if (name == "polynomial") {
        auto it = params.find("term");
        if (it == params.end()) throw ConfigError("field polynomial needs 'term' entries");
        struct Term {
            int comp;
            double coeff;
            std::vector<int> exps;
        };
        std::vector<Term> terms;
        std::istringstream groups(it->second);
        std::string g;
        while (std::getline(groups, g, ';')) {
            std::istringstream is(g);
            Term t;
            double comp_raw;
            if (!(is >> comp_raw >> t.coeff)) throw ConfigError("polynomial term: <component> <coeff> <exponents...>");
            t.comp = static_cast<int>(comp_raw) - 1;
            int e;
            while (is >> e) t.exps.push_back(e);
            if (t.comp < 0 || t.comp >= dim || static_cast<int>(t.exps.size()) != dim)
                throw ConfigError("polynomial term: component or exponent count out of range");
            terms.push_back(std::move(t));
        }
        return FlowField(dim, [terms, dim](const Vec& x) {
            Vec v = Vec::Zero(dim);
            for (const auto& t : terms) {
                double m = t.coeff;
                for (int i = 0; i < dim; ++i) m *= std::pow(x[i], t.exps[static_cast<std::size_t>(i)]);
                v[t.comp] += m;
            }
            return v;
        });
    }
    throw ConfigError("unknown field '" + name + "'");
}

namespace {

Mat parse_matrix(const Entry& e, int dim) {
    const auto xs = parse_number_list(e);
    if (static_cast<int>(xs.size()) != dim * dim)
        fail("matrix needs " + std::to_string(dim * dim) + " row-major entries", e.line);
    Mat A(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) A(r, c) = xs[static_cast<std::size_t>(r * dim + c)];
    return A;
}

LocalAction build_action(const Section& s, int dim, const std::optional<FlowField>& field) {
    reject_unknown(s, {"variant", "a", "potential", "hamiltonian", "rates", "jumps"});
    const Entry* variant = s.find("variant");
    if (!variant) fail("[action] needs a 'variant' key", s.line);
    const std::string v = variant->value;

    auto need_field = [&]() -> const FlowField& {
        if (!field) fail("action variant '" + v + "' needs a [field] section", variant->line);
        return *field;
    };

    if (v == "sde_randers") return LocalAction::sde_randers(need_field());
    if (v == "sde_general") {
        const Entry* ae = s.find("a");
        if (!ae) fail("sde_general needs matrix 'a'", variant->line);
        const Mat A = parse_matrix(*ae, dim);
        return LocalAction::sde_general(need_field(), [A](const Vec&) { return A; });
    }
    if (v == "riemannian") {
        const Entry* ae = s.find("a");
        if (!ae) fail("riemannian needs matrix 'a'", variant->line);
        const Mat A = parse_matrix(*ae, dim);
        return LocalAction::riemannian(dim, [A](const Vec&) { return A; });
    }
    if (v == "agmon") {
        const Entry* pe = s.find("potential");
        if (!pe) fail("agmon needs a 'potential' name", variant->line);
        return LocalAction::agmon(dim, make_potential(pe->value, dim));
    }
    if (v == "hamiltonian") {
        const Entry* he = s.find("hamiltonian");
        if (!he) fail("variant hamiltonian needs a 'hamiltonian' key (sde | markov_jump)", variant->line);
        if (he->value == "sde") {
            Hamiltonian::MatrixField A;
            if (const Entry* ae = s.find("a")) {
                const Mat Am = parse_matrix(*ae, dim);
                A = [Am](const Vec&) { return Am; };
            }
            return LocalAction::hamiltonian(sde_hamiltonian(need_field(), A));
        }
        if (he->value == "markov_jump") {
            const Entry* re = s.find("rates");
            if (!re) fail("markov_jump needs a 'rates' table name", he->line);
            JumpProcess jp;
            if (re->value == "birth_death") {
                if (dim != 1) fail("rates table birth_death is one-dimensional", re->line);
                jp.rates = {[](const Vec&) { return 1.0; }, [](const Vec& x) { return x[0]; }};
                jp.jumps = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
            } else {
                fail("unknown rates table '" + re->value + "'", re->line);
            }
            // jump vectors may be overridden: one ';'-separated group per rate
            if (const Entry* je = s.find("jumps")) {
                std::vector<Vec> jumps;
                std::istringstream groups(je->value);
                std::string g;
                while (std::getline(groups, g, ';')) {
                    std::istringstream is(g);
                    std::vector<double> xs;
                    double v;
                    while (is >> v) xs.push_back(v);
                    if (static_cast<int>(xs.size()) != dim)
                        fail("each jump vector needs dim entries", je->line);
                    Vec e(dim);
                    for (int i = 0; i < dim; ++i) e[i] = xs[static_cast<std::size_t>(i)];
                    jumps.push_back(std::move(e));
                }
                if (jumps.size() != jp.rates.size())
                    fail("need one jump vector per rate", je->line);
                jp.jumps = std::move(jumps);
            }
            return LocalAction::hamiltonian(markov_jump_hamiltonian(dim, std::move(jp)));
        }
        fail("unknown hamiltonian '" + he->value + "'", he->line);
    }
    fail("unknown action variant '" + v + "'", variant->line);
}

AdmissibleManifold build_manifold(const Section& s, int dim, const Scenario& sc, std::string& out_name) {
    reject_unknown(s, {"name", "center", "radius", "potential", "value", "box", "normal", "offset",
                       "term"});
    const Entry* ne = s.find("name");
    if (!ne) fail("[manifold] needs a 'name'", s.line);
    out_name = ne->value;

    if (ne->value == "sphere") {
        const Entry* ce = s.find("center");
        const Entry* re = s.find("radius");
        if (!ce || !re) fail("sphere manifold needs 'center' and 'radius'", s.line);
        const Vec c = parse_vec(*ce, dim);
        const double r = parse_number(*re);
        if (!(r > 0.0)) fail("sphere radius must be positive", re->line);
        Box box = s.find("box") ? parse_box(*s.find("box"), dim)
                                : Box(Vec(c.array() - 2.0 * r), Vec(c.array() + 2.0 * r));
        auto f = [c, r](const Vec& x) { return (x - c).squaredNorm() - r * r; };
        auto g = [c](const Vec& x) { return Vec(2.0 * (x - c)); };
        return AdmissibleManifold(dim, f, g, box);
    }
    if (ne->value == "level_of_potential") {
        const Entry* ve = s.find("value");
        if (!ve) fail("level_of_potential needs 'value'", s.line);
        const double value = parse_number(*ve);
        std::function<double(const Vec&)> V;
        if (const Entry* pe = s.find("potential")) V = make_potential(pe->value, dim);
        else if (sc.potential) V = *sc.potential;
        else fail("level_of_potential needs 'potential' (no gradient field in scope)", s.line);
        const Entry* be = s.find("box");
        if (!be) fail("level_of_potential needs a 'box'", s.line);
        const Box box = parse_box(*be, dim);
        return AdmissibleManifold(dim, [V, value](const Vec& x) { return V(x) - value; }, box);
    }
    if (ne->value == "hyperplane") {
        const Entry* nn = s.find("normal");
        const Entry* oe = s.find("offset");
        const Entry* be = s.find("box");
        if (!nn || !oe || !be) fail("hyperplane manifold needs 'normal', 'offset' and 'box'", s.line);
        const Vec n = parse_vec(*nn, dim);
        const double off = parse_number(*oe);
        return AdmissibleManifold(
            dim, [n, off](const Vec& x) { return n.dot(x) - off; }, [n](const Vec&) { return n; },
            parse_box(*be, dim));
    }
    if (ne->value == "polynomial") {
        const auto terms = s.find_all("term");
        const Entry* be = s.find("box");
        if (terms.empty() || !be) fail("polynomial manifold needs 'term' entries and a 'box'", s.line);
        struct Term {
            double coeff;
            std::vector<int> exps;
        };
        std::vector<Term> parsed;
        for (const Entry* te : terms) {
            std::istringstream is(te->value);
            Term t;
            if (!(is >> t.coeff)) fail("polynomial term: <coeff> <exponents...>", te->line);
            int e;
            while (is >> e) t.exps.push_back(e);
            if (static_cast<int>(t.exps.size()) != dim)
                fail("polynomial term needs one exponent per dimension", te->line);
            parsed.push_back(std::move(t));
        }
        auto level = [parsed, dim](const Vec& x) {
            double f = 0.0;
            for (const auto& t : parsed) {
                double m = t.coeff;
                for (int i = 0; i < dim; ++i) m *= std::pow(x[i], t.exps[static_cast<std::size_t>(i)]);
                f += m;
            }
            return f;
        };
        return AdmissibleManifold(dim, level, parse_box(*be, dim));
    }
    fail("unknown manifold '" + ne->value + "'", ne->line);
}

EndpointSet build_endpoint(const Section& s, const std::string& prefix, int dim) {
    const Entry* pe = s.find(prefix);
    const Entry* se = s.find(prefix + "_sphere");
    if (pe && se) fail("give either '" + prefix + "' or '" + prefix + "_sphere', not both", se->line);
    if (pe) return EndpointSet::point(parse_vec(*pe, dim));
    if (se) {
        const auto xs = parse_number_list(*se);
        if (static_cast<int>(xs.size()) != dim + 1)
            fail(prefix + "_sphere needs center coordinates plus radius", se->line);
        Vec c(dim);
        for (int i = 0; i < dim; ++i) c[i] = xs[static_cast<std::size_t>(i)];
        return EndpointSet::sphere(c, xs.back());
    }
    fail("[problem] needs '" + prefix + "' or '" + prefix + "_sphere'", s.line);
}

} // namespace

double Scenario::Verify::number(const std::string& key, double fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    return std::stod(it->second);
}

std::vector<double> Scenario::Verify::numbers(const std::string& key) const {
    std::vector<double> out;
    auto it = params.find(key);
    if (it == params.end()) return out;
    std::istringstream is(it->second);
    double v;
    while (is >> v) out.push_back(v);
    return out;
}

std::string Scenario::Verify::text(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

Scenario parse_scenario_text(const std::string& text, const std::string& name) {
    std::string body = text;
    if (const auto first = body.find_first_not_of(" \t\r\n"); first != std::string::npos &&
                                                              body[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("scenario JSON: ") + e.what());
        }
        body = json_to_config_text(j);
    }

    const std::vector<Section> sections = tokenize(body);
    Scenario sc;
    sc.name = name;

    // top-level keys
    const Section& top = sections.front();
    reject_unknown(top, {"dim", "seed", "name"});
    const Entry* de = top.find("dim");
    if (!de) throw ConfigError("scenario config: top-level 'dim' is required");
    sc.dim = static_cast<int>(parse_number(*de));
    if (sc.dim < 1) fail("dim must be >= 1", de->line);
    if (const Entry* se = top.find("seed")) sc.seed = parse_u64(*se);
    if (const Entry* ne = top.find("name")) sc.name = ne->value;

    const Section* action_section = nullptr;
    for (std::size_t i = 1; i < sections.size(); ++i) {
        const Section& s = sections[i];
        if (s.name == "field") {
            reject_unknown(s, {"name", "b", "k", "term"});
            const Entry* ne = s.find("name");
            if (!ne) fail("[field] needs a 'name'", s.line);
            sc.field_name = ne->value;
            try {
                sc.field = make_field(ne->value, entries_as_params(s), sc.dim);
            } catch (const ConfigError& err) {
                fail(err.what(), s.line);
            }
            if (field_has_potential(ne->value)) sc.potential = make_potential(ne->value, sc.dim);
        } else if (s.name == "action") {
            action_section = &s;
        } else if (s.name == "manifold") {
            // built after field/action resolution
        } else if (s.name == "problem") {
            reject_unknown(s, {"start", "end", "start_sphere", "end_sphere", "nodes", "box", "max_iters",
                               "step0", "tol_s"});
            Scenario::Problem p{build_endpoint(s, "start", sc.dim), build_endpoint(s, "end", sc.dim)};
            const Entry* be = s.find("box");
            if (!be) fail("[problem] needs a 'box'", s.line);
            p.box = parse_box(*be, sc.dim);
            if (const Entry* e = s.find("nodes")) p.nodes = static_cast<std::size_t>(parse_number(*e));
            if (const Entry* e = s.find("max_iters"))
                p.max_iters = static_cast<std::size_t>(parse_number(*e));
            if (const Entry* e = s.find("step0")) p.step0 = parse_number(*e);
            if (const Entry* e = s.find("tol_s")) p.tol_S = parse_number(*e);
            sc.problem = std::move(p);
        } else if (s.name == "grid") {
            reject_unknown(s, {"box", "counts", "e_set_ok"});
            const Entry* be = s.find("box");
            const Entry* ce = s.find("counts");
            if (!be || !ce) fail("[grid] needs 'box' and 'counts'", s.line);
            Scenario::Grid g{parse_box(*be, sc.dim), {}, true};
            for (double v : parse_number_list(*ce)) g.spec.counts.push_back(static_cast<int>(v));
            if (static_cast<int>(g.spec.counts.size()) != sc.dim)
                fail("grid counts must list one entry per dimension", ce->line);
            if (const Entry* ee = s.find("e_set_ok")) g.e_set_ok = parse_number(*ee) != 0.0;
            sc.grid = std::move(g);
        } else if (s.name == "limit_cycle") {
            reject_unknown(s, {"seed_point", "t_max"});
            const Entry* pe = s.find("seed_point");
            if (!pe) fail("[limit_cycle] needs 'seed_point'", s.line);
            Scenario::CycleSearch cs{parse_vec(*pe, sc.dim), 200.0};
            if (const Entry* te = s.find("t_max")) cs.t_max = parse_number(*te);
            sc.cycle_search = std::move(cs);
        } else if (s.name == "verify") {
            static const std::vector<std::string> known = {
                "suites",          "flowline_point",  "flowline_length",  "dlb_samples",
                "dlb_box",         "dlb_a_const",     "key_manifold",     "key_eps",
                "key_curves",      "key_nodes",       "key_box",          "key_a_const",
                "descent_segments", "pass_tol",       "expect_admissible", "admissibility_samples",
                "tol"};
            for (const auto& [k, e] : s.entries)
                if (std::find(known.begin(), known.end(), k) == known.end())
                    fail("unknown key '" + k + "' in section [verify]", e.line);
            for (const auto& [k, e] : s.entries) {
                if (k == "suites") {
                    std::istringstream is(e.value);
                    std::string suite;
                    while (is >> suite) sc.verify.suites.push_back(suite);
                } else {
                    sc.verify.params[k] = e.value;
                }
            }
        } else {
            fail("unknown section [" + s.name + "]", s.line);
        }
    }

    if (action_section) sc.action = build_action(*action_section, sc.dim, sc.field);

    for (std::size_t i = 1; i < sections.size(); ++i) {
        if (sections[i].name != "manifold") continue;
        std::string mname;
        sc.manifolds.push_back(build_manifold(sections[i], sc.dim, sc, mname));
        sc.manifold_names.push_back(std::move(mname));
    }

    // cross-checks the operations rely on
    if (sc.problem && sc.field && sc.field->dim() != sc.dim)
        throw ConfigError("scenario config: field/endpoint dimension mismatch");
    return sc;
}

Scenario parse_scenario(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    Scenario sc = parse_scenario_text(ss.str(), path);
    return sc;
}

MinimizeProblem Scenario::make_problem() const {
    if (!action) throw ConfigError("scenario has no [action] section");
    if (!problem) throw ConfigError("scenario has no [problem] section");
    MinimizeProblem p{*action, problem->start, problem->end};
    p.nodes = problem->nodes;
    p.box = problem->box;
    p.max_iters = problem->max_iters;
    p.step0 = problem->step0;
    p.tol_S = problem->tol_S;
    p.seed = seed;
    return p;
}

ClassifyContext Scenario::make_classify_context(CriteriaOptions opts) const {
    if (!action) throw ConfigError("scenario has no [action] section");
    if (!field) throw ConfigError("scenario has no [field] section");
    ClassifyContext ctx;
    ctx.field = &*field;
    ctx.action = &*action;
    ctx.opts = opts;
    if (grid) ctx.opts.e_set_condition_ok = grid->e_set_ok;

    // only manifolds that pass the admissibility check enter the context;
    // scenarios may deliberately list rejected candidates
    for (std::size_t i = 0; i < manifolds.size(); ++i) {
        AdmissibleManifold m = manifolds[i];
        AdmissibilityOptions aopts;
        aopts.seed = seed + i;
        if (check_admissible(m, *field, 48, aopts).pass) ctx.manifolds.push_back(std::move(m));
    }

    const Box search = grid ? grid->box : (problem ? problem->box : Box::cube(dim, -2.0, 2.0));
    ctx.equilibria = find_equilibria(*field, search, GridSpec::uniform(dim, 11));

    if (cycle_search) {
        const LimitCycleReport cyc = detect_limit_cycle(*field, cycle_search->seed_point,
                                                        cycle_search->t_max);
        if (cyc.found)
            ctx.limit_cycle = orbit_curve(*field, *cyc.sample_point, *cyc.period, 512);
    }
    return ctx;
}

} // namespace minact
