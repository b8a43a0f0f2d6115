#pragma once

#include "laf/graph.hpp"
#include "laf/kb.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace laf {

enum class VarKind { Acc, Weak };

/// Acc(i, X) is the accrued label of X under attribute i; Weak(i, X) the weakened one.
struct Var {
    VarKind kind = VarKind::Acc;
    std::size_t attribute = 0;
    std::string node;

    friend bool operator==(const Var&, const Var&) = default;
    friend bool operator<(const Var& a, const Var& b) {
        if (a.attribute != b.attribute) return a.attribute < b.attribute;
        if (a.node != b.node) return a.node < b.node;
        return a.kind < b.kind;
    }
};

struct Expr {
    enum class Kind { Const, Param, VarRef, SupportAll, AggregateAll, Conflict };

    Kind kind = Kind::Const;
    double value = 0.0;             ///< Const
    std::string param;              ///< Param name
    double lo = 0.0, hi = 0.0;      ///< Param bounds
    Var var;                        ///< VarRef
    std::vector<Expr> args;         ///< SupportAll / AggregateAll operands, Conflict (left, right)

    static Expr constant(double v);
    static Expr parameter(std::string name, double lo, double hi);
    static Expr ref(Var v);
    static Expr support(std::vector<Expr> terms);
    static Expr aggregate(std::vector<Expr> terms);
    static Expr conflict(Expr left, Expr right);

    friend bool operator==(const Expr&, const Expr&) = default;
};

struct Equation {
    Var lhs;
    Expr rhs;
};

struct ParamDecl {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    std::string node;
    std::size_t attribute = 0;
};

struct ObjectiveRef {
    Direction direction = Direction::Maximize;
    Var var;
};

struct EquationSystem {
    std::vector<std::string> attribute_algebras;
    std::vector<std::string> attribute_labels;
    std::vector<Equation> equations;  ///< sorted by lhs
    std::vector<ParamDecl> params;    ///< sorted by name
    std::vector<ObjectiveRef> objectives;
    std::vector<std::string> warnings;
    /// Node key -> display text.
    std::map<std::string, std::string> display;

    std::size_t attribute_count() const { return attribute_algebras.size(); }
    const Equation* find(const Var& v) const;
    const ParamDecl* find_param(const std::string& name) const;
    std::string display_of(const std::string& node) const;
};

/// Emits one Acc and one Weak equation per (attribute, I-node). `visit_order`
/// lists I-node keys from which the depth-first walk is started; nodes not
/// listed are visited afterwards in key order.
EquationSystem emit_equations(const ArgGraph& g, const KnowledgeBase& kb,
                              const std::vector<std::string>& visit_order = {});

std::string param_name(const std::string& display, const std::string& attribute_label);

std::string render_var(const EquationSystem& sys, const Var& v);
std::string render_expr(const EquationSystem& sys, const Expr& e);
/// One line per equation, in system order.
std::string render_equations(const EquationSystem& sys);

nlohmann::json to_json(const Var& v);
nlohmann::json to_json(const EquationSystem& sys, const Expr& e);
nlohmann::json to_json(const EquationSystem& sys);

}  // namespace laf
