#include "laf/equations.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

namespace laf {

Expr Expr::constant(double v) {
    Expr e;
    e.kind = Kind::Const;
    e.value = v;
    return e;
}

Expr Expr::parameter(std::string name, double lo, double hi) {
    Expr e;
    e.kind = Kind::Param;
    e.param = std::move(name);
    e.lo = lo;
    e.hi = hi;
    return e;
}

Expr Expr::ref(Var v) {
    Expr e;
    e.kind = Kind::VarRef;
    e.var = std::move(v);
    return e;
}

Expr Expr::support(std::vector<Expr> terms) {
    Expr e;
    e.kind = Kind::SupportAll;
    e.args = std::move(terms);
    return e;
}

Expr Expr::aggregate(std::vector<Expr> terms) {
    Expr e;
    e.kind = Kind::AggregateAll;
    e.args = std::move(terms);
    return e;
}

Expr Expr::conflict(Expr left, Expr right) {
    Expr e;
    e.kind = Kind::Conflict;
    e.args.push_back(std::move(left));
    e.args.push_back(std::move(right));
    return e;
}

const Equation* EquationSystem::find(const Var& v) const {
    auto it = std::lower_bound(equations.begin(), equations.end(), v,
                               [](const Equation& e, const Var& x) { return e.lhs < x; });
    return it != equations.end() && it->lhs == v ? &*it : nullptr;
}

const ParamDecl* EquationSystem::find_param(const std::string& name) const {
    for (const auto& p : params)
        if (p.name == name) return &p;
    return nullptr;
}

std::string EquationSystem::display_of(const std::string& node) const {
    auto it = display.find(node);
    return it == display.end() ? node : it->second;
}

std::string param_name(const std::string& display, const std::string& attribute_label) {
    return "p_" + display + "_" + attribute_label;
}

namespace {

class Emitter {
public:
    Emitter(const ArgGraph& g, const KnowledgeBase& kb, EquationSystem& sys) : g_(g), sys_(sys) {
        n_ = kb.attribute_count();
    }

    void visit_from(const std::string& start) {
        if (!g_.find(start) || done_.count(start)) return;
        // Post-order DFS over the CA-free predecessors (Algorithm 1).
        struct Frame {
            std::string key;
            std::vector<std::string> preds;
            std::size_t next = 0;
        };
        std::vector<Frame> stack;
        auto push = [&](const std::string& key) {
            Frame f{key, {}, 0};
            for (const auto* ra : g_.incoming_ra(key))
                for (const auto& p : ra->premises) f.preds.push_back(p);
            on_stack_.insert(key);
            stack.push_back(std::move(f));
        };
        push(start);
        while (!stack.empty()) {
            auto& top = stack.back();
            if (top.next < top.preds.size()) {
                const auto& p = top.preds[top.next++];
                if (!done_.count(p) && !on_stack_.count(p)) push(p);
                continue;
            }
            auto key = std::move(top.key);
            stack.pop_back();
            on_stack_.erase(key);
            done_.insert(key);
            label_node(key);
        }
    }

private:
    Expr base(const INode& node, std::size_t i) {
        const auto& c = (*node.valuation)[i];
        if (!c.interval) return Expr::constant(c.lo);
        auto name = param_name(node.label, sys_.attribute_labels[i]);
        sys_.params.push_back({name, c.lo, c.hi, node.key, i});
        return Expr::parameter(name, c.lo, c.hi);
    }

    // Algorithm 2 for one I-node, every attribute.
    void label_node(const std::string& key) {
        const INode& node = *g_.find(key);
        sys_.display[key] = node.label;
        auto ras = g_.incoming_ra(key);
        auto comp = g_.complement_of(key);
        for (std::size_t i = 0; i < n_; ++i) {
            Var acc{VarKind::Acc, i, key};
            Var weak{VarKind::Weak, i, key};
            Expr acc_rhs;
            if (ras.empty()) {
                acc_rhs = node.valuation ? base(node, i) : Expr::constant(0.0);
            } else {
                std::vector<Expr> terms;
                for (const auto* ra : ras) {
                    std::vector<Expr> factors;
                    for (const auto& p : ra->premises) factors.push_back(Expr::ref({VarKind::Weak, i, p}));
                    terms.push_back(Expr::support(std::move(factors)));
                }
                if (node.valuation) terms.push_back(base(node, i));
                acc_rhs = terms.size() == 1 ? std::move(terms.front()) : Expr::aggregate(std::move(terms));
            }
            sys_.equations.push_back({acc, std::move(acc_rhs)});
            Expr weak_rhs = comp ? Expr::conflict(Expr::ref(acc), Expr::ref({VarKind::Acc, i, *comp}))
                                 : Expr::ref(acc);
            sys_.equations.push_back({weak, std::move(weak_rhs)});
        }
    }

    const ArgGraph& g_;
    EquationSystem& sys_;
    std::size_t n_ = 0;
    std::unordered_set<std::string> done_;
    std::unordered_set<std::string> on_stack_;
};

}  // namespace

EquationSystem emit_equations(const ArgGraph& g, const KnowledgeBase& kb,
                              const std::vector<std::string>& visit_order) {
    EquationSystem sys;
    sys.attribute_algebras = kb.algebras;
    sys.attribute_labels = attribute_labels(kb.algebras);

    Emitter em(g, kb, sys);
    for (const auto& key : visit_order) em.visit_from(key);
    for (const auto& n : g.inodes()) em.visit_from(n.key);

    std::sort(sys.equations.begin(), sys.equations.end(),
              [](const Equation& a, const Equation& b) { return a.lhs < b.lhs; });
    std::sort(sys.params.begin(), sys.params.end(),
              [](const ParamDecl& a, const ParamDecl& b) { return a.name < b.name; });

    for (const auto& o : kb.objectives) {
        auto key = o.literal.key();
        if (!g.find(key)) {
            sys.warnings.push_back("objective on '" + o.literal.str() + "' ignored: claim not in graph");
            continue;
        }
        sys.objectives.push_back({o.direction, {VarKind::Acc, o.attribute, key}});
    }
    return sys;
}

std::string render_var(const EquationSystem& sys, const Var& v) {
    std::string label = v.attribute < sys.attribute_labels.size() ? sys.attribute_labels[v.attribute]
                                                                  : std::to_string(v.attribute);
    return (v.kind == VarKind::Acc ? "Acc[" : "Weak[") + label + "](" + sys.display_of(v.node) + ")";
}

namespace {

void render_into(const EquationSystem& sys, const Expr& e, bool nested, std::string& out) {
    auto list = [&](const char* op, bool parens_children) {
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i) out += op;
            render_into(sys, e.args[i], parens_children, out);
        }
    };
    switch (e.kind) {
        case Expr::Kind::Const:
            out += format_number(e.value);
            break;
        case Expr::Kind::Param:
            out += e.param;
            break;
        case Expr::Kind::VarRef:
            out += render_var(sys, e.var);
            break;
        case Expr::Kind::SupportAll: {
            bool wrap = nested && e.args.size() > 1;
            if (wrap) out += "(";
            list(" ⊙ ", false);
            if (wrap) out += ")";
            break;
        }
        case Expr::Kind::AggregateAll:
            list(" ⊕ ", true);
            break;
        case Expr::Kind::Conflict:
            list(" ⊖ ", false);
            break;
    }
}

}  // namespace

std::string render_expr(const EquationSystem& sys, const Expr& e) {
    std::string out;
    render_into(sys, e, false, out);
    if (e.kind == Expr::Kind::Param)
        out += " ∈ [" + format_number(e.lo) + "," + format_number(e.hi) + "]";
    return out;
}

std::string render_equations(const EquationSystem& sys) {
    std::string out;
    for (const auto& eq : sys.equations) out += render_var(sys, eq.lhs) + " = " + render_expr(sys, eq.rhs) + "\n";
    return out;
}

nlohmann::json to_json(const Var& v) {
    return {{"kind", v.kind == VarKind::Acc ? "acc" : "weak"}, {"attribute", v.attribute}, {"node", v.node}};
}

nlohmann::json to_json(const EquationSystem& sys, const Expr& e) {
    using nlohmann::json;
    auto args = [&] {
        json a = json::array();
        for (const auto& x : e.args) a.push_back(to_json(sys, x));
        return a;
    };
    switch (e.kind) {
        case Expr::Kind::Const:
            return {{"op", "const"}, {"value", e.value}};
        case Expr::Kind::Param:
            return {{"op", "param"}, {"name", e.param}, {"lo", e.lo}, {"hi", e.hi}};
        case Expr::Kind::VarRef: {
            json j = to_json(e.var);
            j["op"] = "var";
            return j;
        }
        case Expr::Kind::SupportAll:
            return {{"op", "support"}, {"args", args()}};
        case Expr::Kind::AggregateAll:
            return {{"op", "aggregate"}, {"args", args()}};
        case Expr::Kind::Conflict:
            return {{"op", "conflict"}, {"args", args()}};
    }
    return nullptr;
}

nlohmann::json to_json(const EquationSystem& sys) {
    using nlohmann::json;
    json attrs = json::array();
    for (std::size_t i = 0; i < sys.attribute_count(); ++i)
        attrs.push_back({{"index", i}, {"label", sys.attribute_labels[i]}, {"algebra", sys.attribute_algebras[i]}});
    json eqs = json::array();
    for (const auto& eq : sys.equations) {
        json j = to_json(eq.lhs);
        j["expr"] = to_json(sys, eq.rhs);
        j["text"] = render_var(sys, eq.lhs) + " = " + render_expr(sys, eq.rhs);
        eqs.push_back(std::move(j));
    }
    json params = json::array();
    for (const auto& p : sys.params)
        params.push_back({{"name", p.name}, {"lo", p.lo}, {"hi", p.hi}, {"node", p.node}, {"attribute", p.attribute}});
    json objs = json::array();
    for (const auto& o : sys.objectives) {
        json j = to_json(o.var);
        j["direction"] = o.direction == Direction::Maximize ? "maximize" : "minimize";
        objs.push_back(std::move(j));
    }
    return {{"attributes", attrs}, {"equations", eqs}, {"params", params}, {"objectives", objs},
            {"warnings", sys.warnings}};
}

}  // namespace laf
