#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace laf {

/// True when a term is a variable (initial uppercase letter).
bool is_variable(std::string_view term);

struct Literal {
    std::string predicate;
    std::vector<std::string> args;
    bool negated = false;

    Literal complement() const;
    bool is_ground() const;
    std::size_t arity() const { return args.size(); }

    /// Surface form, e.g. "~goodArea(houseA)".
    std::string str() const;
    /// Canonical key, e.g. "~goodArea/1(houseA)".
    std::string key() const;
    /// Predicate signature shared by a literal and its complement, e.g. "goodArea/1".
    std::string signature() const;

    friend bool operator==(const Literal&, const Literal&) = default;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// One attribute of a valuation: a point value (lo == hi, !interval) or a closed interval.
struct ValuationComponent {
    double lo = 0.0;
    double hi = 0.0;
    bool interval = false;

    static ValuationComponent point(double v) { return {v, v, false}; }
    static ValuationComponent range(double lo, double hi) { return {lo, hi, true}; }
    double midpoint() const { return lo + (hi - lo) / 2.0; }

    friend bool operator==(const ValuationComponent&, const ValuationComponent&) = default;
};

using Valuation = std::vector<ValuationComponent>;

struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;
};

struct Presumption {
    Literal literal;
    friend bool operator==(const Presumption&, const Presumption&) = default;
};

struct Rule {
    Literal head;
    std::vector<Literal> premises;
    friend bool operator==(const Rule&, const Rule&) = default;
};

struct LabeledFormula {
    std::string id;
    std::variant<Presumption, Rule> body;
    Valuation valuation;
    SourcePos pos;

    bool is_rule() const { return std::holds_alternative<Rule>(body); }
    const Rule* rule() const { return std::get_if<Rule>(&body); }
    /// The presumed literal, or the rule head.
    const Literal& conclusion() const;
    bool is_ground() const;

    /// Positions are ignored.
    friend bool operator==(const LabeledFormula& a, const LabeledFormula& b) {
        return a.id == b.id && a.body == b.body && a.valuation == b.valuation;
    }
};

enum class Direction { Maximize, Minimize };

struct Objective {
    Direction direction = Direction::Maximize;
    Literal literal;
    std::size_t attribute = 0;
    SourcePos pos;

    friend bool operator==(const Objective& a, const Objective& b) {
        return a.direction == b.direction && a.literal == b.literal && a.attribute == b.attribute;
    }
};

struct KnowledgeBase {
    std::vector<std::string> algebras;
    std::vector<LabeledFormula> formulas;
    std::vector<Objective> objectives;
    /// Non-fatal notes from parsing and grounding. Not part of equality.
    std::vector<std::string> diagnostics;

    std::size_t attribute_count() const { return algebras.size(); }
    std::size_t fact_count() const;
    std::size_t rule_count() const;
    bool is_ground() const;
    const LabeledFormula* find(std::string_view id) const;

    friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
        return a.algebras == b.algebras && a.formulas == b.formulas && a.objectives == b.objectives;
    }
};

/// Attribute labels for a KB's algebras; repeated labels get a numeric suffix.
std::vector<std::string> attribute_labels(const std::vector<std::string>& algebras);

KnowledgeBase parse_kb(std::string_view text);
KnowledgeBase parse_kb_file(const std::filesystem::path& path);
/// Parses a single literal such as "~buy(houseA)"; throws SyntaxError.
Literal parse_literal(std::string_view text);
/// Splits "a(x,y),b" at top-level commas.
std::vector<std::string> split_literals(std::string_view text);

/// Shortest round-trip decimal form.
std::string format_number(double v);
std::string format_valuation(const Valuation& v);
std::string print_kb(const KnowledgeBase& kb);

/// Forward-chaining instantiation of schematic rules. Presumptions keep their
/// order; rule instances follow, sorted by id. Instance ids are
/// ruleId@(c1,...,ck) over the rule's variables in order of first appearance.
KnowledgeBase ground(const KnowledgeBase& kb);

}  // namespace laf
