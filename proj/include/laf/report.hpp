#pragma once

#include "laf/acceptability.hpp"
#include "laf/solver.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace laf {

enum class OutputFormat { Json, Text };

struct RunOptions {
    OutputFormat format = OutputFormat::Json;
    bool emit_equations = false;
    bool no_solve = false;
    std::optional<std::string> dot_path;
    ThresholdConfig thresholds;
    SolverConfig solver;
    std::vector<std::pair<std::string, std::string>> prefer;  ///< claim texts
    std::string comparator = "pareto-strict";
    std::vector<double> weights;
    bool oracle = false;
    double oracle_grid = 0.01;
    bool enumerate = false;
};

struct RunOutcome {
    int exit_code = 0;
    nlohmann::json report;  ///< RunReport, see docs/report-schema.md
    std::string output;     ///< rendered in the requested format
};

/// parse -> ground -> build -> emit -> solve/optimize -> classify. Input
/// errors propagate as laf::Error (ParseError carries line and column).
RunOutcome run_pipeline(const std::string& kb_text, const std::string& source_name, const RunOptions& opts);

std::string render_text(const nlohmann::json& report);

}  // namespace laf
