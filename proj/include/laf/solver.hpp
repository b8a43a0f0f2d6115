#pragma once

#include "laf/equations.hpp"
#include "laf/error.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace laf {

struct SolverConfig {
    double residual_tol = 1e-9;
    std::size_t max_iters = 10000;
    double damping = 0.5;
    std::size_t multistart = 8;
    double param_grid = 0.01;
    double dedup_tol = 1e-6;
    std::uint64_t seed = 0;
    /// Fixed parameter values; others default to interval midpoints.
    std::map<std::string, double> param_overrides;

    /// Throws Error when a field is out of range.
    void validate() const;
};

struct LabelingSolution {
    std::map<Var, double> assignment;
    std::map<std::string, double> param_values;
    std::vector<double> residuals;  ///< aligned with EquationSystem::equations
    double max_residual = 0.0;
    std::vector<double> objective_values;
    bool converged = false;
    std::size_t iterations = 0;
    std::vector<std::string> warnings;

    double value(const Var& v) const;
    double acc(std::size_t attribute, const std::string& node) const;
    double weak(std::size_t attribute, const std::string& node) const;
};

class NonConvergence : public Error {
public:
    explicit NonConvergence(LabelingSolution best);
    const LabelingSolution& best() const { return best_; }

private:
    LabelingSolution best_;
};

/// Throws OpenSystem if some referenced variable or parameter is undefined.
void check_closed(const EquationSystem& sys);

/// Residual of every equation under `values`, aligned with sys.equations.
std::vector<double> residuals(const EquationSystem& sys, const std::map<Var, double>& values,
                              const std::map<std::string, double>& params);

/// Fixed-point solve with parameters at their override or midpoint. Throws
/// NonConvergence (carrying the best attempt) or OpenSystem.
LabelingSolution solve(const EquationSystem& sys, const SolverConfig& cfg = {});

/// As solve(), but returns a non-converged solution instead of throwing.
LabelingSolution solve_unchecked(const EquationSystem& sys, const SolverConfig& cfg = {});

/// Grid-enumeration oracle. Conflict variables on support/conflict cycles and
/// every parameter not fixed in cfg.param_overrides are enumerated; the rest
/// is evaluated directly. Throws TooLarge past the size guard.
struct OracleResult {
    /// Per-attribute model sets; attributes never interact, so every
    /// combination is a model of the whole system.
    std::vector<std::vector<std::map<Var, double>>> factors;
    double model_count = 0;
    /// Materialised combinations, at most kOracleMaxModels.
    std::vector<LabelingSolution> models;
    bool truncated = false;
    std::size_t enumerated = 0;  ///< largest per-component dimension
};
inline constexpr std::size_t kOracleMaxDimension = 8;
inline constexpr double kOracleMaxPoints = 5e7;
inline constexpr std::size_t kOracleMaxModels = 256;
OracleResult brute_force_solve(const EquationSystem& sys, double grid, const SolverConfig& cfg = {});

/// True when, for every attribute, some oracle model agrees with `sol` within `tol` per variable.
bool oracle_matches(const OracleResult& oracle, const LabelingSolution& sol, double tol);

/// Coordinate scan of the parameters the objectives depend on, lexicographic
/// over objectives. Throws NoObjectives or NonConvergence.
LabelingSolution optimize(const EquationSystem& sys, const SolverConfig& cfg = {});

}  // namespace laf
