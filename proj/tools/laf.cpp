// laf: command-line front end for the labeled argumentation engine.

#include "laf/algebra.hpp"
#include "laf/error.hpp"
#include "laf/kb.hpp"
#include "laf/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw laf::Error(std::string("bad ") + what + " value '" + item + "'");
        }
    }
    return out;
}

std::uint64_t seed_from_env() {
    const char* s = std::getenv("LAF_SEED");
    if (!s || !*s) return 0;
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw laf::Error(std::string("LAF_SEED must be a non-negative integer, got '") + s + "'");
    }
}

int run_solve(const std::string& file, laf::RunOptions opts, const std::string& tau, const std::string& prefer,
              const std::string& weights, const std::vector<std::string>& params) {
    if (!tau.empty()) opts.thresholds.taus = parse_list(tau, "threshold");
    if (!weights.empty()) opts.weights = parse_list(weights, "weight");
    if (!prefer.empty()) {
        auto parts = laf::split_literals(prefer);
        if (parts.size() != 2) throw laf::Error("--prefer expects two claims separated by a comma");
        opts.prefer.emplace_back(parts[0], parts[1]);
    }
    for (const auto& p : params) {
        auto eq = p.rfind('=');
        if (eq == std::string::npos) throw laf::Error("--param expects name=value, got '" + p + "'");
        opts.solver.param_overrides[p.substr(0, eq)] = parse_list(p.substr(eq + 1), "parameter").at(0);
    }
    opts.solver.seed = seed_from_env();

    std::ifstream in(file, std::ios::binary);
    if (!in) throw laf::Error("cannot read '" + file + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        auto outcome = laf::run_pipeline(text.str(), std::filesystem::path(file).filename().string(), opts);
        std::cout << outcome.output;
        return outcome.exit_code;
    } catch (const laf::ParseError& e) {
        std::cerr << file << ":" << e.line() << ":" << e.column() << ": error: " << e.message() << "\n";
        return 1;
    }
}

int run_axioms(const std::vector<std::string>& names, std::size_t samples, double tol) {
    auto seed = seed_from_env();
    bool ok = true;
    for (const auto& name : names.empty() ? laf::algebra_names() : names) {
        auto report = laf::check_axioms(laf::algebra_by_name(name), samples, tol, seed);
        std::cout << report.algebra << " (" << report.samples << " triples)\n";
        for (const auto& r : report.results) {
            std::cout << "  " << (r.passed ? "pass " : "FAIL ") << r.axiom;
            if (!r.passed) std::cout << "  " << r.detail;
            std::cout << "\n";
        }
        ok = ok && report.all_passed();
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Labeled argumentation framework engine"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "Evaluate a knowledge base");
    std::string file, format = "json", tau, prefer, weights;
    std::vector<std::string> params;
    laf::RunOptions opts;
    solve->add_option("file", file, "KB file")->required();
    solve->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
    solve->add_flag("--emit-equations", opts.emit_equations, "Include the equation system");
    solve->add_flag("--no-solve", opts.no_solve, "Stop after emitting equations");
    solve->add_option("--dot", opts.dot_path, "Write a Graphviz rendering to this path");
    solve->add_option("--tau", tau, "Acceptance thresholds, one per attribute (v1,v2,...)");
    solve->add_option("--tolerance", opts.solver.residual_tol, "Residual tolerance");
    solve->add_option("--max-iter", opts.solver.max_iters, "Sweep limit");
    solve->add_option("--damping", opts.solver.damping, "Damping factor in (0,1]");
    solve->add_option("--multistart", opts.solver.multistart, "Random restarts");
    solve->add_option("--param-grid", opts.solver.param_grid, "Objective scan resolution");
    solve->add_option("--param", params, "Fix a parameter: name=value")->take_all();
    solve->add_option("--prefer", prefer, "Compare two claims: claimA,claimB");
    solve->add_option("--comparator", opts.comparator, "pareto-strict, lexicographic or weighted-sum");
    solve->add_option("--weights", weights, "Weights for weighted-sum (w1,w2,...)");
    solve->add_flag("--oracle", opts.oracle, "Cross-check against the grid oracle");
    solve->add_option("--oracle-grid", opts.oracle_grid, "Oracle grid resolution");
    solve->add_flag("--enumerate", opts.enumerate, "Report every oracle model (implies --oracle)");

    auto* axioms = app.add_subcommand("axioms", "Check algebra laws by random sampling");
    std::vector<std::string> names;
    std::size_t samples = 100000;
    double tol = 1e-12;
    axioms->add_option("--algebra", names, "Algebra name (repeatable; default all)");
    axioms->add_option("--samples", samples, "Random triples");
    axioms->add_option("--tol", tol, "Absolute tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*solve) {
            opts.format = format == "text" ? laf::OutputFormat::Text : laf::OutputFormat::Json;
            opts.oracle = opts.oracle || opts.enumerate;
            return run_solve(file, opts, tau, prefer, weights, params);
        }
        return run_axioms(names, samples, tol);
    } catch (const laf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
