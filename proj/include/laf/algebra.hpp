#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace laf {

/// A label drawn from the real unit interval; 0 is bottom, 1 is top.
using LabelValue = double;

using BinaryOp = std::function<LabelValue(LabelValue, LabelValue)>;

/// Label algebra over the unit interval: a t-norm for support, a t-conorm
/// for aggregation and a conflict (weakening) operation. Immutable once built.
struct LabelAlgebra {
    std::string name;
    BinaryOp support;
    BinaryOp aggregate;
    BinaryOp conflict;
    LabelValue top = 1.0;
    LabelValue bottom = 0.0;

    bool leq(LabelValue a, LabelValue b) const { return a <= b; }
};

/// Product t-norm, probabilistic sum, and the normalised difference as
/// conflict. Registered as "trust-product".
const LabelAlgebra& product_trust_algebra();

/// min t-norm, bounded sum, truncated difference. Registered as
/// "pref-lukasiewicz".
const LabelAlgebra& lukasiewicz_preference_algebra();

/// Looks up a registered algebra; throws UnknownAlgebra.
const LabelAlgebra& algebra_by_name(std::string_view name);

bool has_algebra(std::string_view name);

std::vector<std::string> algebra_names();

/// Short attribute label derived from an algebra name ("trust-product" -> "trust").
std::string attribute_label(std::string_view algebra_name);

struct AxiomResult {
    std::string axiom;
    bool passed = true;
    /// Counterexample triple; only meaningful when !passed.
    LabelValue a = 0, b = 0, c = 0;
    std::string detail;
};

struct AxiomReport {
    std::string algebra;
    std::size_t samples = 0;
    std::vector<AxiomResult> results;

    bool all_passed() const;
    const AxiomResult* find(std::string_view axiom) const;
};

/// Margin (and comparison tolerance) for the residual law
/// ((a (+) b) (-) b) = a, which only holds strictly below top.
inline constexpr double kResidualMargin = 1e-9;

/// Randomised certification of the algebra laws. The 27 corner triples over
/// {0, 0.5, 1} are always checked first, then `samples` uniform triples.
/// Failures are reported as data with a witness, never thrown.
AxiomReport check_axioms(const LabelAlgebra& alg, std::size_t samples, double tol,
                         std::uint64_t seed = 0x5eed);

}  // namespace laf
