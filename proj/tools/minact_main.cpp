#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "minact/io.hpp"
#include "minact/scenario.hpp"
#include "minact/verify.hpp"

using namespace minact;

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir = ".";
    std::size_t nodes = 0;     // 0 = use scenario value
    std::uint64_t seed = 0;    // 0 = use scenario value
    double tol = 0.0;          // 0 = use scenario value
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--scenario", args.scenario_path, "scenario config file")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--nodes", args.nodes, "override the node count");
    cmd->add_option("--seed", args.seed, "override the RNG seed");
    cmd->add_option("--tol", args.tol, "override the solver tolerance");
}

Scenario load(const CommonArgs& args) {
    Scenario sc = parse_scenario(args.scenario_path);
    if (args.seed != 0) sc.seed = args.seed;
    if (args.nodes != 0 && sc.problem) sc.problem->nodes = args.nodes;
    if (args.tol != 0.0 && sc.problem) sc.problem->tol_S = args.tol;
    return sc;
}

std::filesystem::path ensure_out(const std::string& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
}

int cmd_eval(const CommonArgs& args, const std::string& curve_path) {
    const Scenario sc = load(args);
    if (!sc.action) throw ConfigError("eval: scenario has no [action] section");
    const Curve c = read_curve_csv(curve_path);
    if (c.dim() != sc.dim) throw ConfigError("eval: curve dimension does not match the scenario");
    Json j;
    j["value"] = geometric_action(*sc.action, c);
    j["length"] = curve_length(c);
    j["nodes"] = c.nodes.size();
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_minimize(const CommonArgs& args) {
    const Scenario sc = load(args);
    MinimizeProblem p = sc.make_problem();
    FlowField const* field = sc.field ? &*sc.field : nullptr;
    const Curve seed = seed_curve(p, field);
    const MinimizeResult res = minimize(p, seed);

    Json sidecar = minimize_sidecar(res, p);
    if (!res.converged && sc.cycle_search && sc.dim == 2 && field) {
        // a wandering minimization that keeps circling a limit cycle is the
        // signature of the non-existence situation
        const LimitCycleReport cyc = detect_limit_cycle(*field, sc.cycle_search->seed_point,
                                                        sc.cycle_search->t_max);
        if (cyc.found) {
            const Curve loop = orbit_curve(*field, *cyc.sample_point, *cyc.period, 128);
            Vec center = Vec::Zero(2);
            for (const Vec& q : loop.nodes) center += q;
            center /= static_cast<double>(loop.nodes.size());
            const double w = winding_number(res.curve.as_curve(), center);
            sidecar["winding"] = w;
            sidecar["non_existence_suspected"] = std::abs(w) > 1.5;
        }
    }

    const auto out = ensure_out(args.out_dir);
    write_curve_csv((out / "minimizer.csv").string(), res.curve);
    write_text_file((out / "minimizer.json").string(), sidecar.dump(2) + "\n");
    std::cout << "action " << format_double(res.action_value) << " after " << res.iterations
              << " iterations (" << (res.converged ? "converged" : "max_iters") << ")\n";
    return 0;
}

int cmd_criteria(const CommonArgs& args) {
    const Scenario sc = load(args);
    if (!sc.grid) throw ConfigError("criteria: scenario has no [grid] section");
    const ClassifyContext ctx = sc.make_classify_context();
    const auto verdicts = classify_grid(ctx, sc.grid->box, sc.grid->spec);

    const auto out = ensure_out(args.out_dir);
    write_text_file((out / "verdicts.json").string(), to_json(verdicts).dump(2) + "\n");
    {
        std::ofstream os(out / "verdicts.csv", std::ios::binary);
        write_verdict_csv(os, verdicts, sc.dim);
    }
    std::size_t strong = 0, weak = 0, none = 0, nonex = 0;
    for (const auto& v : verdicts) {
        switch (v.verdict) {
            case Verdict::Strong: ++strong; break;
            case Verdict::Weak: ++weak; break;
            case Verdict::NonExistence: ++nonex; break;
            default: ++none; break;
        }
    }
    std::cout << verdicts.size() << " points: " << strong << " strong, " << weak << " weak, " << nonex
              << " non-existence, " << none << " none-applicable\n";
    return 0;
}

int cmd_verify(const CommonArgs& args) {
    const Scenario sc = load(args);
    const VerifyOutcome out = run_verify(sc);
    const auto dir = ensure_out(args.out_dir);
    write_text_file((dir / "verify_report.json").string(), out.report.dump(2) + "\n");
    for (const auto& [name, suite] : out.report.at("suites").items())
        std::cout << (suite.at("pass").get<bool>() ? "PASS " : "FAIL ") << name << "\n";
    return out.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum action curves: geometric action evaluation, minimization, "
                 "existence criteria, property verification"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string curve_path;

    CLI::App* eval = app.add_subcommand("eval", "evaluate the action of a curve CSV");
    add_common(eval, args);
    eval->add_option("--curve", curve_path, "curve CSV file")->required();

    CLI::App* min = app.add_subcommand("minimize", "compute a minimum action curve");
    add_common(min, args);

    CLI::App* crit = app.add_subcommand("criteria", "classify grid points by existence criteria");
    add_common(crit, args);

    CLI::App* ver = app.add_subcommand("verify", "run the scenario's property suites");
    add_common(ver, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval->parsed()) return cmd_eval(args, curve_path);
        if (min->parsed()) return cmd_minimize(args);
        if (crit->parsed()) return cmd_criteria(args);
        if (ver->parsed()) return cmd_verify(args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
