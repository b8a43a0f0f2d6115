#include "laf/kb.hpp"

#include "laf/algebra.hpp"
#include "laf/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace laf {

bool is_variable(std::string_view term) {
    return !term.empty() && std::isupper(static_cast<unsigned char>(term.front()));
}

Literal Literal::complement() const {
    Literal c = *this;
    c.negated = !negated;
    return c;
}

bool Literal::is_ground() const {
    return std::none_of(args.begin(), args.end(), [](const auto& a) { return is_variable(a); });
}

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string join_args(const std::vector<std::string>& args) {
    std::string out = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ',';
        out += args[i];
    }
    return out + ")";
}

}  // namespace

std::string Literal::str() const {
    std::string out = negated ? "~" : "";
    out += predicate;
    if (!args.empty()) out += join_args(args);
    return out;
}

std::string Literal::key() const {
    std::string out = negated ? "~" : "";
    out += signature();
    if (!args.empty()) out += join_args(args);
    return out;
}

std::string Literal::signature() const { return predicate + "/" + std::to_string(args.size()); }

const Literal& LabeledFormula::conclusion() const {
    if (const auto* r = rule()) return r->head;
    return std::get<Presumption>(body).literal;
}

bool LabeledFormula::is_ground() const {
    if (const auto* r = rule())
        return r->head.is_ground() &&
               std::all_of(r->premises.begin(), r->premises.end(), [](const auto& p) { return p.is_ground(); });
    return conclusion().is_ground();
}

std::size_t KnowledgeBase::fact_count() const {
    return std::count_if(formulas.begin(), formulas.end(), [](const auto& f) { return !f.is_rule(); });
}

std::size_t KnowledgeBase::rule_count() const { return formulas.size() - fact_count(); }

bool KnowledgeBase::is_ground() const {
    return std::all_of(formulas.begin(), formulas.end(), [](const auto& f) { return f.is_ground(); });
}

const LabeledFormula* KnowledgeBase::find(std::string_view id) const {
    for (const auto& f : formulas)
        if (f.id == id) return &f;
    return nullptr;
}

std::vector<std::string> attribute_labels(const std::vector<std::string>& algebras) {
    std::vector<std::string> labels;
    std::map<std::string, int> seen;
    for (const auto& name : algebras) {
        auto base = attribute_label(name);
        int n = ++seen[base];
        labels.push_back(n == 1 ? base : base + std::to_string(n));
    }
    return labels;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class LineCursor {
public:
    LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }
    std::size_t column() const { return pos_ + 1; }
    SourcePos here() {
        skip_ws();
        return {line_, column()};
    }

    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_, column(), msg); }

    bool accept(std::string_view tok) {
        skip_ws();
        if (text_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'" + found());
    }

    std::string identifier(const char* what) {
        skip_ws();
        if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail(std::string("expected ") + what + found());
        auto start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    /// Algebra names may contain '-'.
    std::string algebra_name() {
        skip_ws();
        auto start = pos_;
        while (pos_ < text_.size() && (ident_char(text_[pos_]) || text_[pos_] == '-')) ++pos_;
        if (start == pos_) fail("expected algebra name" + found());
        return std::string(text_.substr(start, pos_ - start));
    }

    double number() {
        skip_ws();
        auto start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || std::strchr("+-.eE", text_[pos_])))
            ++pos_;
        double v = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (start == pos_ || ec != std::errc() || ptr != text_.data() + pos_) {
            pos_ = start;
            fail("expected number" + found());
        }
        return v;
    }

    std::size_t index() {
        skip_ws();
        auto start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (start == pos_ || ec != std::errc()) {
            pos_ = start;
            fail("expected attribute index" + found());
        }
        return v;
    }

    std::string found() {
        skip_ws();
        if (pos_ >= text_.size()) return ", found end of line";
        return std::string(", found '") + text_[pos_] + "'";
    }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

struct Parser {
    KnowledgeBase kb;
    bool have_algebras = false;
    std::map<std::string, SourcePos> ids;
    std::map<std::string, std::size_t> arities;  // predicate -> arity

    Literal literal(LineCursor& c) {
        Literal lit;
        auto start = c.here();
        lit.negated = c.accept("~");
        if (lit.negated && c.accept("~")) c.fail("double negation is not allowed");
        lit.predicate = c.identifier("predicate name");
        if (c.accept("(")) {
            do {
                lit.args.push_back(c.identifier("term"));
            } while (c.accept(","));
            c.expect(")");
        }
        auto [it, fresh] = arities.emplace(lit.predicate, lit.args.size());
        if (!fresh && it->second != lit.args.size())
            throw ArityMismatch(start.line, start.column,
                                "predicate '" + lit.predicate + "' used with arity " +
                                    std::to_string(lit.args.size()) + ", previously " +
                                    std::to_string(it->second));
        return lit;
    }

    Valuation valuation(LineCursor& c) {
        auto start = c.here();
        if (!have_algebras)
            throw BadValuation(start.line, start.column, "valuation given before 'algebras' declaration");
        c.expect("{");
        Valuation v;
        do {
            auto at = c.here();
            ValuationComponent comp;
            if (c.accept("[")) {
                double lo = c.number();
                c.expect(",");
                double hi = c.number();
                c.expect("]");
                if (lo > hi) throw BadValuation(at.line, at.column, "interval lower bound exceeds upper bound");
                comp = ValuationComponent::range(lo, hi);
            } else {
                comp = ValuationComponent::point(c.number());
            }
            if (comp.lo < 0.0 || comp.hi > 1.0)
                throw BadValuation(at.line, at.column, "valuation component outside [0,1]");
            v.push_back(comp);
        } while (c.accept(";"));
        c.expect("}");
        if (v.size() != kb.attribute_count())
            throw BadValuation(start.line, start.column,
                               "valuation has " + std::to_string(v.size()) + " components, expected " +
                                   std::to_string(kb.attribute_count()));
        return v;
    }

    std::string rule_id(LineCursor& c) {
        std::string id = c.identifier("rule id");
        if (c.accept("@")) {
            c.expect("(");
            std::vector<std::string> args;
            do {
                args.push_back(c.identifier("constant"));
            } while (c.accept(","));
            c.expect(")");
            id += "@" + join_args(args);
        }
        return id;
    }

    void register_id(const std::string& id, SourcePos pos) {
        auto [it, fresh] = ids.emplace(id, pos);
        if (!fresh)
            throw DuplicateId(pos.line, pos.column,
                              "duplicate id '" + id + "' (first defined on line " +
                                  std::to_string(it->second.line) + ")");
    }

    void end_of_statement(LineCursor& c) {
        if (!c.at_end()) c.fail("unexpected trailing input" + c.found());
    }

    void statement(LineCursor& c) {
        auto start = c.here();
        auto keyword = c.identifier("statement keyword");
        if (keyword == "algebras") {
            if (have_algebras) throw SyntaxError(start.line, start.column, "duplicate 'algebras' declaration");
            do {
                auto at = c.here();
                auto name = c.algebra_name();
                if (!has_algebra(name))
                    throw SyntaxError(at.line, at.column, "unknown algebra '" + name + "'");
                kb.algebras.push_back(name);
            } while (c.accept(","));
            have_algebras = true;
            end_of_statement(c);
        } else if (keyword == "fact") {
            auto at = c.here();
            auto lit = literal(c);
            if (!lit.is_ground()) throw SyntaxError(at.line, at.column, "fact '" + lit.str() + "' is not ground");
            c.expect(":");
            auto val = valuation(c);
            end_of_statement(c);
            register_id(lit.str(), start);
            kb.formulas.push_back({lit.str(), Presumption{std::move(lit)}, std::move(val), start});
        } else if (keyword == "rule") {
            auto id = rule_id(c);
            c.expect(":");
            Rule r;
            r.head = literal(c);
            c.expect("-<");
            do {
                r.premises.push_back(literal(c));
            } while (c.accept(","));
            c.expect(":");
            auto val = valuation(c);
            end_of_statement(c);
            register_id(id, start);
            kb.formulas.push_back({id, std::move(r), std::move(val), start});
        } else if (keyword == "maximize" || keyword == "minimize") {
            Objective obj;
            obj.pos = start;
            obj.direction = keyword == "maximize" ? Direction::Maximize : Direction::Minimize;
            auto at = c.here();
            obj.literal = literal(c);
            if (!obj.literal.is_ground())
                throw SyntaxError(at.line, at.column, "objective literal '" + obj.literal.str() + "' is not ground");
            c.expect(":");
            at = c.here();
            obj.attribute = c.index();
            if (obj.attribute >= kb.attribute_count())
                throw SyntaxError(at.line, at.column,
                                  "attribute index " + std::to_string(obj.attribute) + " out of range");
            end_of_statement(c);
            kb.objectives.push_back(std::move(obj));
        } else {
            throw SyntaxError(start.line, start.column, "unknown statement '" + keyword + "'");
        }
    }
};

}  // namespace

KnowledgeBase parse_kb(std::string_view text) {
    Parser p;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        LineCursor c(line, line_no);
        if (c.at_end()) continue;
        p.statement(c);
    }
    return std::move(p.kb);
}

Literal parse_literal(std::string_view text) {
    Parser p;
    LineCursor c(text, 1);
    auto lit = p.literal(c);
    p.end_of_statement(c);
    return lit;
}

std::vector<std::string> split_literals(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : text) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
            continue;
        }
        cur += ch;
    }
    out.push_back(trim(cur));
    return out;
}

KnowledgeBase parse_kb_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_kb(ss.str());
}

// ---------------------------------------------------------------------------
// Printer

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_valuation(const Valuation& v) {
    std::string out = "{";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += "; ";
        if (v[i].interval)
            out += "[" + format_number(v[i].lo) + "," + format_number(v[i].hi) + "]";
        else
            out += format_number(v[i].lo);
    }
    return out + "}";
}

std::string print_kb(const KnowledgeBase& kb) {
    std::ostringstream os;
    if (!kb.algebras.empty()) {
        os << "algebras ";
        for (std::size_t i = 0; i < kb.algebras.size(); ++i) os << (i ? ", " : "") << kb.algebras[i];
        os << "\n";
    }
    for (const auto& f : kb.formulas) {
        if (const auto* r = f.rule()) {
            os << "rule " << f.id << ": " << r->head.str() << " -< ";
            for (std::size_t i = 0; i < r->premises.size(); ++i) os << (i ? ", " : "") << r->premises[i].str();
        } else {
            os << "fact " << f.conclusion().str();
        }
        os << " : " << format_valuation(f.valuation) << "\n";
    }
    for (const auto& o : kb.objectives)
        os << (o.direction == Direction::Maximize ? "maximize " : "minimize ") << o.literal.str() << " : "
           << o.attribute << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Grounding

namespace {

using Binding = std::map<std::string, std::string>;

std::string pattern_key(const Literal& l) { return (l.negated ? "~" : "") + l.signature(); }

bool unify(const Literal& pattern, const Literal& fact, Binding& b) {
    if (pattern.negated != fact.negated || pattern.predicate != fact.predicate ||
        pattern.args.size() != fact.args.size())
        return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        const auto& t = pattern.args[i];
        if (!is_variable(t)) {
            if (t != fact.args[i]) return false;
            continue;
        }
        auto [it, fresh] = b.emplace(t, fact.args[i]);
        if (!fresh && it->second != fact.args[i]) return false;
    }
    return true;
}

Literal substitute(const Literal& l, const Binding& b) {
    Literal out = l;
    for (auto& a : out.args)
        if (is_variable(a)) a = b.at(a);
    return out;
}

std::vector<std::string> variables_in_order(const Rule& r) {
    std::vector<std::string> vars;
    auto scan = [&](const Literal& l) {
        for (const auto& a : l.args)
            if (is_variable(a) && std::find(vars.begin(), vars.end(), a) == vars.end()) vars.push_back(a);
    };
    scan(r.head);
    for (const auto& p : r.premises) scan(p);
    return vars;
}

bool is_safe(const Rule& r) {
    for (const auto& a : r.head.args) {
        if (!is_variable(a)) continue;
        bool bound = std::any_of(r.premises.begin(), r.premises.end(), [&](const Literal& p) {
            return std::find(p.args.begin(), p.args.end(), a) != p.args.end();
        });
        if (!bound) return false;
    }
    return true;
}

class Grounder {
public:
    explicit Grounder(const KnowledgeBase& kb) : kb_(kb) {}

    KnowledgeBase run() {
        KnowledgeBase out;
        out.algebras = kb_.algebras;
        out.objectives = kb_.objectives;
        out.diagnostics = kb_.diagnostics;

        for (const auto& f : kb_.formulas) {
            if (!f.is_rule()) {
                out.formulas.push_back(f);
                establish(f.conclusion());
                continue;
            }
            const auto& r = *f.rule();
            if (!is_safe(r)) {
                out.diagnostics.push_back("rule '" + f.id +
                                          "' has a head variable not bound by any premise; skipped");
                continue;
            }
            rules_.push_back({&f, variables_in_order(r)});
        }
        for (std::size_t ri = 0; ri < rules_.size(); ++ri)
            for (std::size_t pi = 0; pi < rules_[ri].formula->rule()->premises.size(); ++pi)
                triggers_[pattern_key(rules_[ri].formula->rule()->premises[pi])].push_back({ri, pi});

        while (!agenda_.empty()) {
            Literal next = agenda_.front();
            agenda_.pop_front();
            fire(next);
        }

        for (auto& [id, inst] : instances_) out.formulas.push_back(std::move(inst));
        for (const auto& rs : rules_)
            if (!rs.fired)
                out.diagnostics.push_back("rule '" + rs.formula->id + "' never fired; no ground instances");
        return out;
    }

private:
    struct RuleState {
        const LabeledFormula* formula;
        std::vector<std::string> vars;
        bool fired = false;
    };

    void establish(const Literal& l) {
        auto key = l.key();
        if (!established_.insert(key).second) return;
        by_pattern_[pattern_key(l)].push_back(l);
        agenda_.push_back(l);
    }

    void fire(const Literal& lit) {
        auto it = triggers_.find(pattern_key(lit));
        if (it == triggers_.end()) return;
        for (auto [ri, pi] : it->second) {
            const auto& premises = rules_[ri].formula->rule()->premises;
            Binding b;
            if (!unify(premises[pi], lit, b)) continue;
            join(ri, pi, 0, b);
        }
    }

    // Extends `b` over every premise except `skip`, emitting an instance for
    // each complete match.
    void join(std::size_t ri, std::size_t skip, std::size_t idx, Binding& b) {
        const auto& premises = rules_[ri].formula->rule()->premises;
        if (idx == premises.size()) {
            emit(ri, b);
            return;
        }
        if (idx == skip) {
            join(ri, skip, idx + 1, b);
            return;
        }
        auto pit = by_pattern_.find(pattern_key(premises[idx]));
        if (pit == by_pattern_.end()) return;
        // Index-based: establishing new literals during emit may grow the vector.
        const auto& candidates = pit->second;
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            Binding ext = b;
            if (unify(premises[idx], candidates[k], ext)) join(ri, skip, idx + 1, ext);
        }
    }

    void emit(std::size_t ri, const Binding& b) {
        auto& rs = rules_[ri];
        const auto& f = *rs.formula;
        std::string id = f.id;
        if (!rs.vars.empty()) {
            std::vector<std::string> values;
            for (const auto& v : rs.vars) values.push_back(b.at(v));
            id += "@" + join_args(values);
        }
        if (instances_.count(id)) return;
        Rule inst;
        inst.head = substitute(f.rule()->head, b);
        for (const auto& p : f.rule()->premises) inst.premises.push_back(substitute(p, b));
        rs.fired = true;
        Literal head = inst.head;
        instances_.emplace(id, LabeledFormula{id, std::move(inst), f.valuation, f.pos});
        establish(head);
    }

    const KnowledgeBase& kb_;
    std::vector<RuleState> rules_;
    std::unordered_map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> triggers_;
    std::unordered_map<std::string, std::vector<Literal>> by_pattern_;
    std::set<std::string> established_;
    std::deque<Literal> agenda_;
    std::map<std::string, LabeledFormula> instances_;
};

}  // namespace

KnowledgeBase ground(const KnowledgeBase& kb) {
    // Already ground: nothing to instantiate, and rules that cannot apply are
    // reported by the graph builder instead.
    if (kb.is_ground()) return kb;
    return Grounder(kb).run();
}

}  // namespace laf
