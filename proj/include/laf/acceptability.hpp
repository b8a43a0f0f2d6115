#pragma once

#include "laf/graph.hpp"
#include "laf/solver.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace laf {

inline constexpr double kStatusEps = 1e-9;

enum class Dichotomy { Rejected, Accepted };

/// Ordered from least to greatest degree.
enum class Gradual { Rejected = 0, Weakened = 1, Unchallenged = 2, Assured = 3 };

std::string to_string(Dichotomy d);
std::string to_string(Gradual g);

struct ThresholdConfig {
    std::vector<double> taus;  ///< one per attribute, each in [0,1); empty means all zero

    double tau(std::size_t attribute) const { return attribute < taus.size() ? taus[attribute] : 0.0; }
    /// Throws Error unless taus is empty or has n entries in [0,1).
    void validate(std::size_t n) const;
};

/// Per-attribute rules, with eps = kStatusEps:
///   accepted  iff Weak > eps and Weak >= tau - eps
///   gradual   Rejected if not accepted, else Assured if Weak = 1,
///             else Unchallenged if Acc = Weak, else Weakened.
bool accepted_at(double weak, double tau);
Gradual gradual_at(double acc, double weak, double tau);

struct ClaimStatus {
    std::string node;
    std::string claim;  ///< display text
    Dichotomy dichotomy = Dichotomy::Rejected;
    Gradual gradual = Gradual::Rejected;
    std::vector<Gradual> per_attribute;
    std::vector<double> acc;
    std::vector<double> weak;
};

enum class PreferenceResult { A, B, Both, Incomparable };
std::string to_string(PreferenceResult r);

struct PreferenceRecord {
    std::string a;
    std::string b;
    PreferenceResult result = PreferenceResult::Incomparable;
    std::string comparator;
};

struct StatusReport {
    std::vector<ClaimStatus> claims;  ///< literal I-nodes in key order
    std::vector<PreferenceRecord> preferences;

    const ClaimStatus* find(std::string_view claim_text) const;
};

/// Classifies every literal I-node (rule instances are not claims).
StatusReport classify(const LabelingSolution& sol, const ArgGraph& g, const EquationSystem& sys,
                      const ThresholdConfig& t = {});

std::vector<std::string> comparator_names();

/// Compares the weakened label tuples of two claims. `weights` is used by
/// "weighted-sum" (default: equal weights). Throws UnknownClaim / UnknownComparator.
PreferenceRecord prefer(const LabelingSolution& sol, const ArgGraph& g, const EquationSystem& sys,
                        const Literal& a, const Literal& b, const std::string& comparator,
                        const std::vector<double>& weights = {});

/// Tuple-level comparison used by prefer().
PreferenceResult compare_tuples(const std::vector<double>& a, const std::vector<double>& b,
                                const std::string& comparator, const std::vector<double>& weights = {});

}  // namespace laf
