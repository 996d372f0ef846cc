#ifndef MINACT_SCENARIO_HPP
#define MINACT_SCENARIO_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minact/criteria.hpp"
#include "minact/minimizer.hpp"

namespace minact {

/// Everything a run needs, parsed from a sectioned text config (the
/// canonical format) or the equivalent JSON document.
struct Scenario {
    int dim = 0;
    std::uint64_t seed = 20140906;
    std::string name;

    std::optional<FlowField> field;
    std::string field_name;
    std::optional<std::function<double(const Vec&)>> potential;  // for gradient fields

    std::optional<LocalAction> action;

    std::vector<AdmissibleManifold> manifolds;
    std::vector<std::string> manifold_names;

    // [problem]
    struct Problem {
        EndpointSet start, end;
        std::size_t nodes = 200;
        Box box;
        std::size_t max_iters = 4000;
        double step0 = 0.1;
        double tol_S = 1e-10;
    };
    std::optional<Problem> problem;

    // [grid]
    struct Grid {
        Box box;
        GridSpec spec;
        // the state-constraint condition declared satisfied (default: E = D)
        bool e_set_ok = true;
    };
    std::optional<Grid> grid;

    // [limit_cycle]
    struct CycleSearch {
        Vec seed_point;
        double t_max = 200.0;
    };
    std::optional<CycleSearch> cycle_search;

    // [verify]
    struct Verify {
        std::vector<std::string> suites;
        std::map<std::string, std::string> params;

        bool has(const std::string& key) const { return params.count(key) > 0; }
        double number(const std::string& key, double fallback) const;
        std::vector<double> numbers(const std::string& key) const;
        std::string text(const std::string& key, const std::string& fallback) const;
    };
    Verify verify;

    MinimizeProblem make_problem() const;
    /// Classification context: admissibility-checked manifolds, equilibria
    /// found over the grid box, the detected limit cycle when configured.
    ClassifyContext make_classify_context(CriteriaOptions opts = {}) const;
};

/// Parses a scenario file; files starting with '{' are treated as JSON.
/// Malformed text raises ConfigError with the line number; unknown sections
/// or keys are rejected.
Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& name = "<inline>");

// Built-in registries (External Interfaces).
FlowField make_field(const std::string& name, const std::map<std::string, std::string>& params, int dim);
std::function<double(const Vec&)> make_potential(const std::string& name, int dim);
bool field_has_potential(const std::string& name);

} // namespace minact

#endif
