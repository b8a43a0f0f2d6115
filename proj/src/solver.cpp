#include "laf/solver.hpp"

#include "laf/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace laf {

void SolverConfig::validate() const {
    if (!(residual_tol > 0)) throw Error("residual tolerance must be positive");
    if (max_iters == 0) throw Error("max iterations must be positive");
    if (!(damping > 0 && damping <= 1)) throw Error("damping must lie in (0,1]");
    if (!(param_grid > 0)) throw Error("parameter grid must be positive");
    if (!(dedup_tol > 0)) throw Error("dedup tolerance must be positive");
}

double LabelingSolution::value(const Var& v) const {
    auto it = assignment.find(v);
    if (it == assignment.end()) throw Error("no value for " + v.node);
    return it->second;
}

double LabelingSolution::acc(std::size_t attribute, const std::string& node) const {
    return value({VarKind::Acc, attribute, node});
}

double LabelingSolution::weak(std::size_t attribute, const std::string& node) const {
    return value({VarKind::Weak, attribute, node});
}

NonConvergence::NonConvergence(LabelingSolution best)
    : Error([&] {
          std::ostringstream os;
          os << "solver did not converge after " << best.iterations << " sweeps (max residual "
             << best.max_residual << ")";
          return os.str();
      }()),
      best_(std::move(best)) {}

namespace {

std::vector<const LabelAlgebra*> algebras_of(const EquationSystem& sys) {
    std::vector<const LabelAlgebra*> out;
    for (const auto& name : sys.attribute_algebras) out.push_back(&algebra_by_name(name));
    return out;
}

double eval_tree(const LabelAlgebra& alg, const Expr& e, const std::map<Var, double>& values,
                 const std::map<std::string, double>& params) {
    switch (e.kind) {
        case Expr::Kind::Const:
            return e.value;
        case Expr::Kind::Param:
            return params.at(e.param);
        case Expr::Kind::VarRef:
            return values.at(e.var);
        case Expr::Kind::SupportAll: {
            double acc = alg.top;
            for (const auto& a : e.args) acc = alg.support(acc, eval_tree(alg, a, values, params));
            return acc;
        }
        case Expr::Kind::AggregateAll: {
            double acc = alg.bottom;
            for (const auto& a : e.args) acc = alg.aggregate(acc, eval_tree(alg, a, values, params));
            return acc;
        }
        case Expr::Kind::Conflict:
            return alg.conflict(eval_tree(alg, e.args[0], values, params),
                                eval_tree(alg, e.args[1], values, params));
    }
    return 0.0;
}

}  // namespace

void check_closed(const EquationSystem& sys) {
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (e.kind == Expr::Kind::VarRef && !sys.find(e.var))
            throw OpenSystem("variable on node '" + e.var.node + "' has no defining equation");
        if (e.kind == Expr::Kind::Param && !sys.find_param(e.param))
            throw OpenSystem("parameter '" + e.param + "' is not declared");
        if ((e.kind == Expr::Kind::SupportAll || e.kind == Expr::Kind::AggregateAll) && e.args.empty())
            throw OpenSystem("empty operand list");
        for (const auto& a : e.args) walk(a);
    };
    for (const auto& eq : sys.equations) {
        if (eq.lhs.attribute >= sys.attribute_count())
            throw OpenSystem("equation for node '" + eq.lhs.node + "' uses an undeclared attribute");
        walk(eq.rhs);
    }
    for (const auto& o : sys.objectives)
        if (!sys.find(o.var)) throw OpenSystem("objective on node '" + o.var.node + "' has no variable");
}

std::vector<double> residuals(const EquationSystem& sys, const std::map<Var, double>& values,
                              const std::map<std::string, double>& params) {
    auto algs = algebras_of(sys);
    std::vector<double> out;
    out.reserve(sys.equations.size());
    for (const auto& eq : sys.equations) {
        double rhs = eval_tree(*algs[eq.lhs.attribute], eq.rhs, values, params);
        out.push_back(std::abs(rhs - values.at(eq.lhs)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fixed-point solver

namespace {

std::map<std::string, double> fixed_params(const EquationSystem& sys, const SolverConfig& cfg) {
    std::map<std::string, double> out;
    for (const auto& p : sys.params) out[p.name] = p.lo + (p.hi - p.lo) / 2.0;
    for (const auto& [name, v] : cfg.param_overrides) {
        const auto* p = sys.find_param(name);
        if (!p) throw Error("unknown parameter '" + name + "'");
        if (v < p->lo - 1e-12 || v > p->hi + 1e-12)
            throw Error("parameter '" + name + "' value " + format_number(v) + " outside [" +
                        format_number(p->lo) + "," + format_number(p->hi) + "]");
        out[name] = std::clamp(v, p->lo, p->hi);
    }
    return out;
}

// Flat expression program over variable slots (slot = equation index).
class Program {
public:
    explicit Program(const EquationSystem& sys) : sys_(sys), algs_(algebras_of(sys)) {
        check_closed(sys);
        std::map<std::string, int> pidx;
        for (std::size_t i = 0; i < sys.params.size(); ++i) pidx[sys.params[i].name] = static_cast<int>(i);
        const std::size_t n = sys.equations.size();
        roots_.resize(n);
        deps_.resize(n);
        param_deps_.resize(n);
        conflict_.assign(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& eq = sys.equations[i];
            roots_[i] = compile(eq.rhs, pidx, i);
            conflict_[i] = eq.rhs.kind == Expr::Kind::Conflict;
            auto& d = deps_[i];
            std::sort(d.begin(), d.end());
            d.erase(std::unique(d.begin(), d.end()), d.end());
        }
    }

    std::size_t size() const { return roots_.size(); }
    bool is_conflict(std::size_t i) const { return conflict_[i]; }
    const std::vector<std::size_t>& deps(std::size_t i) const { return deps_[i]; }
    const std::vector<std::size_t>& param_deps(std::size_t i) const { return param_deps_[i]; }
    /// For a conflict slot: the own Acc slot and the opposing Acc slot.
    std::size_t own_acc(std::size_t i) const { return static_cast<std::size_t>(nodes_[first_child(roots_[i])].index); }
    std::size_t opposing_acc(std::size_t i) const {
        return static_cast<std::size_t>(nodes_[first_child(roots_[i]) + 1].index);
    }
    std::size_t slot(const Var& v) const { return static_cast<std::size_t>(sys_.find(v) - sys_.equations.data()); }

    double eval(std::size_t i, const std::vector<double>& x, const std::vector<double>& p) const {
        return eval_node(roots_[i], *algs_[sys_.equations[i].lhs.attribute], x, p);
    }

private:
    struct Node {
        Expr::Kind kind;
        double value = 0.0;
        int index = -1;          // slot or param index
        std::size_t first = 0;   // children are contiguous in nodes_
        std::size_t count = 0;
    };

    std::size_t first_child(std::size_t node) const { return nodes_[node].first; }

    std::size_t compile(const Expr& e, const std::map<std::string, int>& pidx, std::size_t eq) {
        std::size_t id = nodes_.size();
        nodes_.push_back({e.kind});
        switch (e.kind) {
            case Expr::Kind::Const:
                nodes_[id].value = e.value;
                break;
            case Expr::Kind::Param:
                nodes_[id].index = pidx.at(e.param);
                param_deps_[eq].push_back(static_cast<std::size_t>(nodes_[id].index));
                break;
            case Expr::Kind::VarRef: {
                auto s = slot(e.var);
                nodes_[id].index = static_cast<int>(s);
                deps_[eq].push_back(s);
                break;
            }
            default: {
                // Reserve contiguous child slots, then fill them.
                std::size_t first = nodes_.size();
                nodes_.resize(first + e.args.size());
                nodes_[id].first = first;
                nodes_[id].count = e.args.size();
                for (std::size_t k = 0; k < e.args.size(); ++k) {
                    std::size_t child = compile(e.args[k], pidx, eq);
                    nodes_[first + k] = nodes_[child];
                }
            }
        }
        return id;
    }

    double eval_node(std::size_t id, const LabelAlgebra& alg, const std::vector<double>& x,
                     const std::vector<double>& p) const {
        const Node& n = nodes_[id];
        switch (n.kind) {
            case Expr::Kind::Const:
                return n.value;
            case Expr::Kind::Param:
                return p[static_cast<std::size_t>(n.index)];
            case Expr::Kind::VarRef:
                return x[static_cast<std::size_t>(n.index)];
            case Expr::Kind::SupportAll: {
                double acc = alg.top;
                for (std::size_t k = 0; k < n.count; ++k) acc = alg.support(acc, eval_node(n.first + k, alg, x, p));
                return acc;
            }
            case Expr::Kind::AggregateAll: {
                double acc = alg.bottom;
                for (std::size_t k = 0; k < n.count; ++k)
                    acc = alg.aggregate(acc, eval_node(n.first + k, alg, x, p));
                return acc;
            }
            case Expr::Kind::Conflict:
                return alg.conflict(eval_node(n.first, alg, x, p), eval_node(n.first + 1, alg, x, p));
        }
        return 0.0;
    }

    const EquationSystem& sys_;
    std::vector<const LabelAlgebra*> algs_;
    std::vector<Node> nodes_;
    std::vector<std::size_t> roots_;
    std::vector<std::vector<std::size_t>> deps_;
    std::vector<std::vector<std::size_t>> param_deps_;
    std::vector<bool> conflict_;
};

// Level-synchronous sweep schedule. Levels come from the dependency DAG in
// which a conflict slot depends only on its own Acc slot; a conflict slot runs
// in stage max(level of own Acc, level of opposing Acc) + 1, ahead of the
// plain slots of that stage. Within a group all updates are simultaneous, so
// the schedule does not depend on node names.
struct Schedule {
    std::vector<std::size_t> level_order;  // topological order of the reduced DAG
    struct Stage {
        std::vector<std::size_t> conflicts;
        std::vector<std::size_t> plain;
    };
    std::vector<Stage> stages;
    std::vector<std::size_t> conflict_slots;
};

Schedule make_schedule(const Program& prog) {
    const std::size_t n = prog.size();
    std::vector<std::vector<std::size_t>> users(n);
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (prog.is_conflict(i)) {
            users[prog.own_acc(i)].push_back(i);
            indeg[i] = 1;
        } else {
            for (auto d : prog.deps(i)) users[d].push_back(i);
            indeg[i] = prog.deps(i).size();
        }
    }
    std::vector<std::size_t> level(n, 0);
    Schedule s;
    std::queue<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push(i);
    while (!ready.empty()) {
        auto v = ready.front();
        ready.pop();
        s.level_order.push_back(v);
        for (auto u : users[v]) {
            level[u] = std::max(level[u], level[v] + 1);
            if (--indeg[u] == 0) ready.push(u);
        }
    }
    if (s.level_order.size() != n) throw Error("equation system has a cycle without a conflict equation");
    std::stable_sort(s.level_order.begin(), s.level_order.end(),
                     [&](auto a, auto b) { return level[a] < level[b]; });

    std::vector<std::size_t> stage(n);
    std::size_t max_stage = 0;
    for (std::size_t i = 0; i < n; ++i) {
        stage[i] = prog.is_conflict(i) ? std::max(level[prog.own_acc(i)], level[prog.opposing_acc(i)]) + 1
                                       : level[i];
        max_stage = std::max(max_stage, stage[i]);
        if (prog.is_conflict(i)) s.conflict_slots.push_back(i);
    }
    s.stages.resize(max_stage + 1);
    for (std::size_t i = 0; i < n; ++i)
        (prog.is_conflict(i) ? s.stages[stage[i]].conflicts : s.stages[stage[i]].plain).push_back(i);
    return s;
}

constexpr int kDampingHalvings = 4;

struct RunResult {
    std::vector<double> x;
    double max_residual = std::numeric_limits<double>::infinity();
    std::size_t sweeps = 0;
    bool converged = false;
};

class Iterator {
public:
    Iterator(const Program& prog, const Schedule& sched, const std::vector<double>& params)
        : prog_(prog), sched_(sched), params_(params) {}

    /// Evaluates every slot in level order; conflict slots take `conflict_init`
    /// (or their own Acc value, the unopposed evaluation, when null).
    std::vector<double> initial(const std::vector<double>* conflict_init) const {
        std::vector<double> x(prog_.size(), 0.0);
        std::size_t c = 0;
        for (auto i : sched_.level_order) {
            if (!prog_.is_conflict(i)) {
                x[i] = prog_.eval(i, x, params_);
                continue;
            }
            x[i] = conflict_init ? (*conflict_init)[c++] : x[prog_.own_acc(i)];
        }
        return x;
    }

    double max_residual(const std::vector<double>& x) const {
        double r = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(prog_.eval(i, x, params_) - x[i]));
        return r;
    }

    RunResult run(std::vector<double> x, double lambda, std::size_t budget, double tol) const {
        RunResult best;
        std::vector<double> next;
        for (std::size_t sweep = 0;; ++sweep) {
            double r = max_residual(x);
            if (r < best.max_residual || sweep == 0) {
                best.x = x;
                best.max_residual = r;
                best.sweeps = sweep;
            }
            if (r <= tol) {
                best.converged = true;
                best.sweeps = sweep;
                return best;
            }
            if (sweep == budget) return best;
            for (const auto& st : sched_.stages) {
                next.clear();
                for (auto i : st.conflicts) next.push_back(prog_.eval(i, x, params_));
                for (std::size_t k = 0; k < st.conflicts.size(); ++k) {
                    auto i = st.conflicts[k];
                    x[i] = (1.0 - lambda) * x[i] + lambda * next[k];
                }
                next.clear();
                for (auto i : st.plain) next.push_back(prog_.eval(i, x, params_));
                for (std::size_t k = 0; k < st.plain.size(); ++k) x[st.plain[k]] = next[k];
            }
        }
    }

    /// Undamped first, then restarts from the same start with the configured
    /// damping halved each time. A fixed factor cycles whenever the coupled
    /// map is steeper than 1/lambda - 1, so smaller factors are tried before
    /// giving up. The sweep budget is shared across attempts.
    RunResult cascade(const std::vector<double>& start, const SolverConfig& cfg) const {
        std::vector<double> lambdas{1.0};
        if (cfg.damping < 1.0) lambdas.push_back(cfg.damping);
        for (int k = 0; k < kDampingHalvings; ++k) lambdas.push_back(lambdas.back() / 2);
        std::size_t budget = std::max<std::size_t>(1, cfg.max_iters / lambdas.size());
        RunResult best;
        std::size_t used = 0;
        for (double lambda : lambdas) {
            auto r = run(start, lambda, budget, cfg.residual_tol);
            std::size_t spent = r.converged ? r.sweeps : budget;
            if (r.converged || r.max_residual < best.max_residual) best = std::move(r);
            used += spent;
            if (best.converged) break;
        }
        best.sweeps = used;
        return best;
    }

private:
    const Program& prog_;
    const Schedule& sched_;
    const std::vector<double>& params_;
};

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

LabelingSolution package(const EquationSystem& sys, const Program& prog, const std::vector<double>& x,
                         const std::map<std::string, double>& params, const std::vector<double>& pvec,
                         const SolverConfig& cfg, std::size_t sweeps) {
    LabelingSolution sol;
    for (std::size_t i = 0; i < x.size(); ++i) sol.assignment.emplace(sys.equations[i].lhs, x[i]);
    sol.param_values = params;
    sol.residuals.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = std::abs(prog.eval(i, x, pvec) - x[i]);
        sol.residuals.push_back(r);
        sol.max_residual = std::max(sol.max_residual, r);
    }
    sol.converged = sol.max_residual <= cfg.residual_tol;
    sol.iterations = sweeps;
    for (const auto& o : sys.objectives) sol.objective_values.push_back(x[prog.slot(o.var)]);
    return sol;
}

}  // namespace

LabelingSolution solve_unchecked(const EquationSystem& sys, const SolverConfig& cfg) {
    cfg.validate();
    Program prog(sys);
    auto params = fixed_params(sys, cfg);
    std::vector<double> pvec;
    for (const auto& p : sys.params) pvec.push_back(params.at(p.name));
    auto sched = make_schedule(prog);
    Iterator it(prog, sched, pvec);

    auto primary = it.cascade(it.initial(nullptr), cfg);
    std::vector<std::string> warnings;

    if (!sched.conflict_slots.empty() && cfg.multistart > 0) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<RunResult> found;
        for (std::size_t s = 0; s < cfg.multistart; ++s) {
            std::vector<double> init;
            for (std::size_t k = 0; k < sched.conflict_slots.size(); ++k) init.push_back(unit(rng));
            auto r = it.cascade(it.initial(&init), cfg);
            if (!r.converged) continue;
            bool dup = primary.converged && max_diff(r.x, primary.x) <= cfg.dedup_tol;
            for (const auto& f : found) dup = dup || max_diff(r.x, f.x) <= cfg.dedup_tol;
            if (!dup) found.push_back(std::move(r));
        }
        if (!primary.converged && !found.empty()) {
            auto best = std::min_element(found.begin(), found.end(), [](const auto& a, const auto& b) {
                if (a.max_residual != b.max_residual) return a.max_residual < b.max_residual;
                return lex_less(a.x, b.x);
            });
            std::size_t sweeps = primary.sweeps + best->sweeps;
            primary = std::move(*best);
            primary.sweeps = sweeps;
            warnings.push_back("default start did not converge; solution taken from a multistart run");
            if (found.size() > 1)
                warnings.push_back("multistart found " + std::to_string(found.size() - 1) +
                                   " additional model(s)");
        } else if (!found.empty()) {
            warnings.push_back("multistart found " + std::to_string(found.size()) + " additional model(s)");
        }
    }

    auto sol = package(sys, prog, primary.x, params, pvec, cfg, primary.sweeps);
    sol.warnings = std::move(warnings);
    return sol;
}

LabelingSolution solve(const EquationSystem& sys, const SolverConfig& cfg) {
    auto sol = solve_unchecked(sys, cfg);
    if (!sol.converged) throw NonConvergence(std::move(sol));
    return sol;
}

// ---------------------------------------------------------------------------
// Optimisation

namespace {

// Positive when `a` is better than `b` under the objectives, lexicographically.
int compare_objectives(const EquationSystem& sys, const std::vector<double>& a, const std::vector<double>& b) {
    constexpr double eps = 1e-12;
    for (std::size_t j = 0; j < sys.objectives.size(); ++j) {
        double sign = sys.objectives[j].direction == Direction::Maximize ? 1.0 : -1.0;
        double d = sign * (a[j] - b[j]);
        if (d > eps) return 1;
        if (d < -eps) return -1;
    }
    return 0;
}

std::vector<double> grid_points(double lo, double hi, double step) {
    std::vector<double> out;
    if (hi <= lo) return {lo};
    auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9));
    for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    out.push_back(hi);
    return out;
}

}  // namespace

LabelingSolution optimize(const EquationSystem& sys, const SolverConfig& cfg) {
    if (sys.objectives.empty()) throw NoObjectives();
    cfg.validate();
    Program prog(sys);

    // Parameters reachable from each objective variable.
    std::set<std::size_t> reachable;
    {
        std::vector<bool> seen(prog.size(), false);
        std::vector<std::size_t> stack;
        for (const auto& o : sys.objectives) stack.push_back(prog.slot(o.var));
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            if (seen[v]) continue;
            seen[v] = true;
            for (auto p : prog.param_deps(v)) reachable.insert(p);
            for (auto d : prog.deps(v)) stack.push_back(d);
        }
    }
    std::vector<std::size_t> scan;
    for (auto p : reachable)
        if (!cfg.param_overrides.count(sys.params[p].name)) scan.push_back(p);

    if (scan.empty()) {
        auto sol = solve(sys, cfg);
        sol.warnings.push_back("objectives do not depend on any free parameter; plain solve used");
        return sol;
    }

    SolverConfig probe = cfg;
    probe.multistart = 0;
    for (auto p : scan) probe.param_overrides[sys.params[p].name] = sys.params[p].lo + (sys.params[p].hi - sys.params[p].lo) / 2.0;

    auto score = [&](const SolverConfig& c, bool& ok) {
        auto s = solve_unchecked(sys, c);
        ok = s.converged;
        return s.objective_values;
    };

    bool inc_ok = false;
    auto incumbent = score(probe, inc_ok);
    for (int pass = 0; pass < 3; ++pass) {
        bool changed = false;
        for (auto p : scan) {
            const auto& decl = sys.params[p];
            double current = probe.param_overrides[decl.name];
            double best_v = current;
            auto best = incumbent;
            bool best_ok = inc_ok;
            for (double v : grid_points(decl.lo, decl.hi, cfg.param_grid)) {
                if (v == current) continue;
                auto trial = probe;
                trial.param_overrides[decl.name] = v;
                bool ok = false;
                auto s = score(trial, ok);
                if (!ok) continue;
                if (!best_ok || compare_objectives(sys, s, best) > 0) {
                    best = s;
                    best_v = v;
                    best_ok = true;
                }
            }
            if (best_v != current) {
                probe.param_overrides[decl.name] = best_v;
                incumbent = best;
                inc_ok = best_ok;
                changed = true;
            }
        }
        if (!changed) break;
    }

    SolverConfig final_cfg = cfg;
    final_cfg.param_overrides = probe.param_overrides;
    return solve(sys, final_cfg);
}

// ---------------------------------------------------------------------------
// Grid oracle. Deliberately shares no evaluation code with the solver above.

namespace {

struct OExpr {
    Expr::Kind kind;
    double value = 0.0;
    std::size_t slot = 0;   // VarRef slot or param index
    std::vector<OExpr> args;
};

struct OracleSystem {
    const EquationSystem& sys;
    std::vector<const LabelAlgebra*> algs;
    std::vector<OExpr> rhs;
    std::vector<std::vector<std::size_t>> deps;
    std::vector<std::vector<std::size_t>> pdeps;

    explicit OracleSystem(const EquationSystem& s) : sys(s), algs(algebras_of(s)) {
        check_closed(s);
        for (std::size_t i = 0; i < s.equations.size(); ++i) {
            deps.emplace_back();
            pdeps.emplace_back();
            rhs.push_back(lower(s.equations[i].rhs, i));
        }
    }

    OExpr lower(const Expr& e, std::size_t eq) {
        OExpr o;
        o.kind = e.kind;
        if (e.kind == Expr::Kind::Const) o.value = e.value;
        if (e.kind == Expr::Kind::VarRef) {
            o.slot = static_cast<std::size_t>(sys.find(e.var) - sys.equations.data());
            deps[eq].push_back(o.slot);
        }
        if (e.kind == Expr::Kind::Param) {
            o.slot = static_cast<std::size_t>(sys.find_param(e.param) - sys.params.data());
            pdeps[eq].push_back(o.slot);
        }
        for (const auto& a : e.args) o.args.push_back(lower(a, eq));
        return o;
    }

    double eval(const OExpr& e, const LabelAlgebra& alg, const std::vector<double>& x,
                const std::vector<double>& p) const {
        switch (e.kind) {
            case Expr::Kind::Const: return e.value;
            case Expr::Kind::Param: return p[e.slot];
            case Expr::Kind::VarRef: return x[e.slot];
            case Expr::Kind::SupportAll: {
                double v = eval(e.args[0], alg, x, p);
                for (std::size_t k = 1; k < e.args.size(); ++k) v = alg.support(v, eval(e.args[k], alg, x, p));
                return v;
            }
            case Expr::Kind::AggregateAll: {
                double v = eval(e.args[0], alg, x, p);
                for (std::size_t k = 1; k < e.args.size(); ++k) v = alg.aggregate(v, eval(e.args[k], alg, x, p));
                return v;
            }
            case Expr::Kind::Conflict:
                return alg.conflict(eval(e.args[0], alg, x, p), eval(e.args[1], alg, x, p));
        }
        return 0.0;
    }

    double eval(std::size_t i, const std::vector<double>& x, const std::vector<double>& p) const {
        return eval(rhs[i], *algs[sys.equations[i].lhs.attribute], x, p);
    }
};

// Tarjan over "depends on" edges; components come out dependencies first.
std::vector<std::vector<std::size_t>> strongly_connected(const std::vector<std::vector<std::size_t>>& deps,
                                                         const std::vector<std::size_t>& nodes) {
    const std::size_t n = deps.size();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    int counter = 0;
    struct Frame {
        std::size_t v;
        std::size_t next;
    };
    for (auto root : nodes) {
        if (index[root] >= 0) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on[root] = true;
        while (!call.empty()) {
            auto& f = call.back();
            if (f.next < deps[f.v].size()) {
                auto w = deps[f.v][f.next++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on[w] = true;
                    call.push_back({w, 0});
                } else if (on[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            auto v = f.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on[w] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                out.push_back(std::move(comp));
            }
        }
    }
    return out;
}

struct Partial {
    std::vector<double> x;
    std::vector<double> p;
};

// Materialised parameter combinations are held in memory, so they get a
// tighter cap than the point guard.
constexpr double kMaxParamCombos = 2e6;

class AttributeOracle {
public:
    AttributeOracle(const OracleSystem& os, std::size_t attribute, double grid, const SolverConfig& cfg,
                    std::size_t& max_dim)
        : os_(os), grid_(grid), cfg_(cfg), max_dim_(max_dim) {
        const auto& sys = os.sys;
        for (std::size_t i = 0; i < sys.equations.size(); ++i)
            if (sys.equations[i].lhs.attribute == attribute) slots_.push_back(i);
        for (std::size_t j = 0; j < sys.params.size(); ++j)
            if (sys.params[j].attribute == attribute) params_.push_back(j);
        axis_ = grid_points(0.0, 1.0, grid);
    }

    std::vector<Partial> run() {
        const auto& sys = os_.sys;
        Partial base{std::vector<double>(sys.equations.size(), 0.0), std::vector<double>(sys.params.size(), 0.0)};
        std::vector<Partial> models{base};

        // Size the parameter grid before materialising any of it.
        std::size_t free_params = 0;
        double combos = 1;
        for (auto j : params_) {
            const auto& decl = sys.params[j];
            if (cfg_.param_overrides.count(decl.name)) continue;
            ++free_params;
            combos *= static_cast<double>(grid_points(decl.lo, decl.hi, grid_).size());
        }
        if (free_params > kOracleMaxDimension)
            throw TooLarge("oracle: " + std::to_string(free_params) + " free parameters exceed the guard of " +
                           std::to_string(kOracleMaxDimension));
        if (combos > kMaxParamCombos)
            throw TooLarge("oracle: " + format_number(combos) + " parameter combinations exceed the guard");
        max_dim_ = std::max(max_dim_, free_params);

        for (auto j : params_) {
            const auto& decl = sys.params[j];
            if (auto it = cfg_.param_overrides.find(decl.name); it != cfg_.param_overrides.end()) {
                for (auto& m : models) m.p[j] = it->second;
                continue;
            }
            auto values = grid_points(decl.lo, decl.hi, grid_);
            std::vector<Partial> next;
            for (const auto& m : models)
                for (double v : values) {
                    next.push_back(m);
                    next.back().p[j] = v;
                }
            models = std::move(next);
        }

        for (const auto& comp : strongly_connected(os_.deps, slots_)) {
            bool cyclic = comp.size() > 1;
            if (!cyclic) {
                for (auto& m : models) m.x[comp[0]] = os_.eval(comp[0], m.x, m.p);
                continue;
            }
            models = solve_component(comp, models);
            if (models.empty()) break;
        }
        return models;
    }

private:
    void guard(double points) const {
        if (points > kOracleMaxPoints)
            throw TooLarge("oracle: enumeration of " + format_number(points) + " points exceeds the guard");
    }

    std::vector<Partial> solve_component(const std::vector<std::size_t>& comp, const std::vector<Partial>& upstream) {
        std::vector<std::size_t> tears, rest;
        for (auto v : comp) (os_.sys.equations[v].rhs.kind == Expr::Kind::Conflict ? tears : rest).push_back(v);
        const std::size_t k = tears.size();
        if (k > kOracleMaxDimension)
            throw TooLarge("oracle: a conflict cycle couples " + std::to_string(k) +
                           " variables, above the guard of " + std::to_string(kOracleMaxDimension));
        max_dim_ = std::max(max_dim_, k);
        guard(static_cast<double>(upstream.size()) * std::pow(static_cast<double>(axis_.size()), static_cast<double>(k)));

        // Order the non-tear members so each sees its in-component inputs first.
        std::set<std::size_t> in_rest(rest.begin(), rest.end());
        std::vector<std::size_t> order;
        std::set<std::size_t> placed;
        while (order.size() < rest.size()) {
            for (auto v : rest) {
                if (placed.count(v)) continue;
                bool ready = std::all_of(os_.deps[v].begin(), os_.deps[v].end(),
                                         [&](auto d) { return !in_rest.count(d) || placed.count(d); });
                if (ready) {
                    order.push_back(v);
                    placed.insert(v);
                }
            }
        }

        std::vector<Partial> out;
        for (const auto& up : upstream) {
            std::vector<std::vector<double>> roots;
            Partial work = up;
            auto residual_at = [&](const std::vector<double>& t) {
                for (std::size_t a = 0; a < k; ++a) work.x[tears[a]] = t[a];
                for (auto v : order) work.x[v] = os_.eval(v, work.x, work.p);
                double r = 0.0;
                for (std::size_t a = 0; a < k; ++a)
                    r = std::max(r, std::abs(os_.eval(tears[a], work.x, work.p) - t[a]));
                return r;
            };

            std::vector<std::size_t> idx(k, 0);
            std::vector<double> t(k);
            while (true) {
                for (std::size_t a = 0; a < k; ++a) t[a] = axis_[idx[a]];
                if (residual_at(t) <= grid_) {
                    auto refined = refine(t, residual_at);
                    if (residual_at(refined) <= kRefineAccept) {
                        bool dup = std::any_of(roots.begin(), roots.end(), [&](const auto& r) {
                            for (std::size_t a = 0; a < k; ++a)
                                if (std::abs(r[a] - refined[a]) > cfg_.dedup_tol) return false;
                            return true;
                        });
                        if (!dup) roots.push_back(refined);
                    }
                }
                std::size_t a = 0;
                while (a < k && ++idx[a] == axis_.size()) idx[a++] = 0;
                if (a == k) break;
            }
            for (const auto& r : roots) {
                residual_at(r);
                out.push_back(work);
                if (out.size() > kOracleMaxModels * 64)
                    throw TooLarge("oracle: too many partial models in one attribute");
            }
        }
        return out;
    }

    // Pattern search on the tear residual, shrinking the step to ~1e-13.
    template <class F>
    std::vector<double> refine(std::vector<double> t, F& residual_at) const {
        const std::size_t k = t.size();
        double best = residual_at(t);
        double h = grid_;
        while (h > 1e-13 && best > 1e-15) {
            bool moved = false;
            std::vector<int> d(k, -1);
            while (true) {
                std::vector<double> cand = t;
                bool zero = true;
                for (std::size_t a = 0; a < k; ++a) {
                    cand[a] = std::clamp(t[a] + d[a] * h, 0.0, 1.0);
                    zero = zero && d[a] == 0;
                }
                if (!zero) {
                    double r = residual_at(cand);
                    if (r < best) {
                        best = r;
                        t = cand;
                        moved = true;
                    }
                }
                std::size_t a = 0;
                while (a < k && ++d[a] == 2) d[a++] = -1;
                if (a == k) break;
            }
            if (!moved) h /= 2.0;
        }
        return t;
    }

    static constexpr double kRefineAccept = 1e-8;

    const OracleSystem& os_;
    double grid_;
    const SolverConfig& cfg_;
    std::size_t& max_dim_;
    std::vector<std::size_t> slots_;
    std::vector<std::size_t> params_;
    std::vector<double> axis_;
};

}  // namespace

OracleResult brute_force_solve(const EquationSystem& sys, double grid, const SolverConfig& cfg) {
    if (!(grid > 0 && grid <= 1)) throw Error("oracle grid must lie in (0,1]");
    OracleSystem os(sys);
    OracleResult result;

    std::vector<std::vector<Partial>> factors;
    for (std::size_t a = 0; a < sys.attribute_count(); ++a)
        factors.push_back(AttributeOracle(os, a, grid, cfg, result.enumerated).run());

    double count = 1.0;
    for (const auto& f : factors) count *= static_cast<double>(f.size());
    if (sys.attribute_count() == 0) count = 1.0;
    result.model_count = count;

    auto to_solution = [&](const std::vector<std::size_t>& pick) {
        std::vector<double> x(sys.equations.size(), 0.0), p(sys.params.size(), 0.0);
        for (std::size_t a = 0; a < factors.size(); ++a) {
            const auto& part = factors[a][pick[a]];
            for (std::size_t i = 0; i < x.size(); ++i)
                if (sys.equations[i].lhs.attribute == a) x[i] = part.x[i];
            for (std::size_t j = 0; j < p.size(); ++j)
                if (sys.params[j].attribute == a) p[j] = part.p[j];
        }
        LabelingSolution s;
        for (std::size_t i = 0; i < x.size(); ++i) s.assignment.emplace(sys.equations[i].lhs, x[i]);
        for (std::size_t j = 0; j < p.size(); ++j) s.param_values[sys.params[j].name] = p[j];
        for (std::size_t i = 0; i < x.size(); ++i) {
            double r = std::abs(os.eval(i, x, p) - x[i]);
            s.residuals.push_back(r);
            s.max_residual = std::max(s.max_residual, r);
        }
        s.converged = true;
        for (const auto& o : sys.objectives) s.objective_values.push_back(s.assignment.at(o.var));
        return s;
    };

    // Per-attribute factors, kept for matching without materialising the product.
    for (std::size_t a = 0; a < factors.size(); ++a) {
        std::vector<std::map<Var, double>> fa;
        for (const auto& part : factors[a]) {
            std::map<Var, double> m;
            for (std::size_t i = 0; i < sys.equations.size(); ++i)
                if (sys.equations[i].lhs.attribute == a) m.emplace(sys.equations[i].lhs, part.x[i]);
            fa.push_back(std::move(m));
        }
        result.factors.push_back(std::move(fa));
    }

    if (count == 0) return result;
    std::vector<std::size_t> pick(factors.size(), 0);
    while (true) {
        if (result.models.size() == kOracleMaxModels) {
            result.truncated = true;
            break;
        }
        result.models.push_back(to_solution(pick));
        std::size_t a = 0;
        while (a < pick.size() && ++pick[a] == factors[a].size()) pick[a++] = 0;
        if (a == pick.size()) break;
    }
    return result;
}

bool oracle_matches(const OracleResult& oracle, const LabelingSolution& sol, double tol) {
    for (const auto& factor : oracle.factors) {
        bool any = std::any_of(factor.begin(), factor.end(), [&](const auto& m) {
            for (const auto& [v, x] : m) {
                auto it = sol.assignment.find(v);
                if (it == sol.assignment.end() || std::abs(it->second - x) > tol) return false;
            }
            return true;
        });
        if (!any) return false;
    }
    return true;
}

}  // namespace laf
