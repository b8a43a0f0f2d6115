#include "laf/report.hpp"

#include "laf/dot.hpp"
#include "laf/graph.hpp"
#include "laf/kb.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace laf {

namespace {

using nlohmann::json;

json solution_json(const EquationSystem& sys, const ArgGraph& g, const LabelingSolution& sol, const char* mode) {
    json values = json::array();
    for (const auto& n : g.inodes()) {
        json acc = json::array(), weak = json::array();
        for (std::size_t i = 0; i < sys.attribute_count(); ++i) {
            acc.push_back(sol.acc(i, n.key));
            weak.push_back(sol.weak(i, n.key));
        }
        values.push_back({{"node", n.key}, {"label", n.label}, {"acc", acc}, {"weak", weak}});
    }
    json objectives = json::array();
    for (std::size_t j = 0; j < sys.objectives.size(); ++j) {
        const auto& o = sys.objectives[j];
        objectives.push_back({{"direction", o.direction == Direction::Maximize ? "maximize" : "minimize"},
                              {"node", o.var.node},
                              {"attribute", o.var.attribute},
                              {"value", sol.objective_values[j]}});
    }
    return {{"mode", mode},
            {"converged", sol.converged},
            {"iterations", sol.iterations},
            {"max_residual", sol.max_residual},
            {"params", sol.param_values},
            {"objectives", objectives},
            {"values", values},
            {"warnings", sol.warnings}};
}

json statuses_json(const StatusReport& st) {
    json out = json::array();
    for (const auto& c : st.claims) {
        json per = json::array();
        for (auto gi : c.per_attribute) per.push_back(to_string(gi));
        out.push_back({{"claim", c.claim},
                       {"node", c.node},
                       {"dichotomy", to_string(c.dichotomy)},
                       {"gradual", to_string(c.gradual)},
                       {"per_attribute", per},
                       {"acc", c.acc},
                       {"weak", c.weak}});
    }
    return out;
}

}  // namespace

RunOutcome run_pipeline(const std::string& kb_text, const std::string& source_name, const RunOptions& opts) {
    opts.solver.validate();
    auto parsed = parse_kb(kb_text);
    auto grounded = ground(parsed);
    auto g = build_graph(grounded);
    auto sys = emit_equations(g, grounded);
    opts.thresholds.validate(sys.attribute_count());

    RunOutcome out;
    json& r = out.report;
    json attrs = json::array();
    for (std::size_t i = 0; i < sys.attribute_count(); ++i)
        attrs.push_back({{"index", i}, {"label", sys.attribute_labels[i]}, {"algebra", sys.attribute_algebras[i]}});
    r["source"] = source_name;
    r["kb"] = {{"facts", parsed.fact_count()},
               {"rules", parsed.rule_count()},
               {"ground_instances", grounded.rule_count()},
               {"objectives", parsed.objectives.size()},
               {"attributes", attrs}};
    r["graph"] = {{"m", g.inodes().size()}, {"t", g.ranodes().size()}, {"k", g.canodes().size()}};

    json diagnostics = json::array();
    for (const auto& d : grounded.diagnostics) diagnostics.push_back(d);
    for (const auto& d : g.diagnostics()) diagnostics.push_back(d);
    for (const auto& w : sys.warnings) diagnostics.push_back(w);

    if (opts.emit_equations) {
        r["equations"] = to_json(sys);
        std::string text = render_equations(sys);
        json lines = json::array();
        std::istringstream is(text);
        for (std::string line; std::getline(is, line);) lines.push_back(line);
        r["equations"]["rendered"] = lines;
    }

    std::optional<LabelingSolution> sol;
    if (!opts.no_solve) {
        const char* mode = sys.objectives.empty() ? "solve" : "optimize";
        try {
            sol = sys.objectives.empty() ? solve(sys, opts.solver) : optimize(sys, opts.solver);
        } catch (const NonConvergence& nc) {
            sol = nc.best();
            out.exit_code = 2;
            diagnostics.push_back(std::string("non-convergence: ") + nc.what());
        }
        r["solution"] = solution_json(sys, g, *sol, mode);
        json taus = json::array();
        for (std::size_t i = 0; i < sys.attribute_count(); ++i) taus.push_back(opts.thresholds.tau(i));
        r["thresholds"] = taus;

        if (sol->converged) {
            auto st = classify(*sol, g, sys, opts.thresholds);
            r["statuses"] = statuses_json(st);
            json prefs = json::array();
            for (const auto& [a, b] : opts.prefer) {
                auto rec = prefer(*sol, g, sys, parse_literal(a), parse_literal(b), opts.comparator, opts.weights);
                json winners = json::array();
                if (rec.result == PreferenceResult::A || rec.result == PreferenceResult::Both) winners.push_back(rec.a);
                if (rec.result == PreferenceResult::B || rec.result == PreferenceResult::Both) winners.push_back(rec.b);
                prefs.push_back({{"a", rec.a},
                                 {"b", rec.b},
                                 {"result", to_string(rec.result)},
                                 {"preferred", winners},
                                 {"comparator", rec.comparator}});
            }
            r["preferences"] = prefs;
        }

        if (opts.oracle) {
            json o = {{"grid", opts.oracle_grid}};
            try {
                SolverConfig ocfg = opts.solver;
                ocfg.param_overrides = sol->param_values;
                auto res = brute_force_solve(sys, opts.oracle_grid, ocfg);
                double tol = std::max(opts.oracle_grid, 1e-3);
                bool matched = oracle_matches(res, *sol, tol);
                o["models"] = res.model_count;
                o["matched"] = matched;
                o["match_tolerance"] = tol;
                o["max_dimension"] = res.enumerated;
                o["truncated"] = res.truncated;
                if (res.model_count > 1)
                    diagnostics.push_back("oracle found " + format_number(res.model_count) +
                                          " models; the reported solution is one of them");
                if (!matched) diagnostics.push_back("oracle cross-check failed: no oracle model matches the solution");
                if (opts.enumerate) {
                    json models = json::array();
                    for (const auto& m : res.models) models.push_back(solution_json(sys, g, m, "oracle"));
                    o["solutions"] = models;
                }
            } catch (const TooLarge& e) {
                o["error"] = e.what();
                diagnostics.push_back(std::string("oracle skipped: ") + e.what());
            }
            r["oracle"] = o;
        }
    }
    r["diagnostics"] = diagnostics;

    if (opts.dot_path) {
        std::ofstream dot(*opts.dot_path, std::ios::binary);
        if (!dot) throw Error("cannot write '" + *opts.dot_path + "'");
        dot << export_dot(g, sol ? &*sol : nullptr, &sys);
    }

    if (opts.format == OutputFormat::Json) {
        out.output = r.dump(2) + "\n";
    } else {
        out.output = render_text(r);
        if (opts.emit_equations && opts.no_solve) out.output = render_equations(sys);
    }
    return out;
}

std::string render_text(const nlohmann::json& r) {
    std::ostringstream os;
    const auto& kb = r.at("kb");
    os << "kb: " << kb.at("facts") << " facts, " << kb.at("rules") << " rules, " << kb.at("ground_instances")
       << " ground instances\n";
    const auto& g = r.at("graph");
    os << "graph: m=" << g.at("m") << " t=" << g.at("t") << " k=" << g.at("k") << "\n";
    if (r.contains("equations"))
        for (const auto& line : r["equations"]["rendered"]) os << line.get<std::string>() << "\n";
    if (r.contains("solution")) {
        const auto& s = r["solution"];
        os << "solution: " << s["mode"].get<std::string>() << ", "
           << (s["converged"].get<bool>() ? "converged" : "NOT converged") << " after " << s["iterations"]
           << " sweeps, max residual " << s["max_residual"].get<double>() << "\n";
        for (const auto& [name, v] : s["params"].items()) os << "  " << name << " = " << v.get<double>() << "\n";
    }
    if (r.contains("statuses")) {
        std::vector<std::string> labels;
        for (const auto& a : kb.at("attributes")) labels.push_back(a.at("label").get<std::string>());
        for (const auto& c : r["statuses"]) {
            os << "  " << std::left << std::setw(32) << c["claim"].get<std::string>() << " " << std::setw(9)
               << c["dichotomy"].get<std::string>() << " " << std::setw(13) << c["gradual"].get<std::string>();
            for (std::size_t i = 0; i < labels.size(); ++i) {
                os << " " << labels[i] << "=" << std::setprecision(6) << c["acc"][i].get<double>() << "/"
                   << c["weak"][i].get<double>();
            }
            os << "\n";
        }
    }
    if (r.contains("preferences"))
        for (const auto& p : r["preferences"])
            os << "prefer " << p["a"].get<std::string>() << " vs " << p["b"].get<std::string>() << " ("
               << p["comparator"].get<std::string>() << "): " << p["result"].get<std::string>() << "\n";
    if (r.contains("oracle")) os << "oracle: " << r["oracle"].dump() << "\n";
    for (const auto& d : r.at("diagnostics")) os << "note: " << d.get<std::string>() << "\n";
    return os.str();
}

}  // namespace laf
