#include "laf/acceptability.hpp"

#include <algorithm>
#include <cmath>

namespace laf {

std::string to_string(Dichotomy d) { return d == Dichotomy::Accepted ? "accepted" : "rejected"; }

std::string to_string(Gradual g) {
    switch (g) {
        case Gradual::Rejected: return "rejected";
        case Gradual::Weakened: return "weakened";
        case Gradual::Unchallenged: return "unchallenged";
        case Gradual::Assured: return "assured";
    }
    return "rejected";
}

std::string to_string(PreferenceResult r) {
    switch (r) {
        case PreferenceResult::A: return "A";
        case PreferenceResult::B: return "B";
        case PreferenceResult::Both: return "both";
        case PreferenceResult::Incomparable: return "incomparable";
    }
    return "incomparable";
}

void ThresholdConfig::validate(std::size_t n) const {
    if (taus.empty()) return;
    if (taus.size() != n)
        throw Error("expected " + std::to_string(n) + " thresholds, got " + std::to_string(taus.size()));
    for (double t : taus)
        if (!(t >= 0.0 && t < 1.0)) throw Error("threshold " + format_number(t) + " outside [0,1)");
}

bool accepted_at(double weak, double tau) { return weak > kStatusEps && weak >= tau - kStatusEps; }

Gradual gradual_at(double acc, double weak, double tau) {
    if (!accepted_at(weak, tau)) return Gradual::Rejected;
    if (std::abs(weak - 1.0) <= kStatusEps) return Gradual::Assured;
    if (std::abs(acc - weak) <= kStatusEps) return Gradual::Unchallenged;
    return Gradual::Weakened;
}

const ClaimStatus* StatusReport::find(std::string_view claim_text) const {
    for (const auto& c : claims)
        if (c.claim == claim_text) return &c;
    return nullptr;
}

StatusReport classify(const LabelingSolution& sol, const ArgGraph& g, const EquationSystem& sys,
                      const ThresholdConfig& t) {
    t.validate(sys.attribute_count());
    StatusReport report;
    for (const auto& n : g.inodes()) {
        if (n.kind != INodeKind::Literal) continue;
        ClaimStatus cs;
        cs.node = n.key;
        cs.claim = n.label;
        bool all_accepted = true;
        Gradual least = Gradual::Assured;
        for (std::size_t i = 0; i < sys.attribute_count(); ++i) {
            double acc = sol.acc(i, n.key);
            double weak = sol.weak(i, n.key);
            cs.acc.push_back(acc);
            cs.weak.push_back(weak);
            all_accepted = all_accepted && accepted_at(weak, t.tau(i));
            auto gi = gradual_at(acc, weak, t.tau(i));
            cs.per_attribute.push_back(gi);
            least = std::min(least, gi);
        }
        cs.dichotomy = all_accepted ? Dichotomy::Accepted : Dichotomy::Rejected;
        cs.gradual = sys.attribute_count() == 0 ? Gradual::Rejected : least;
        report.claims.push_back(std::move(cs));
    }
    return report;
}

std::vector<std::string> comparator_names() { return {"lexicographic", "pareto-strict", "weighted-sum"}; }

namespace {

constexpr double kCmpEps = 1e-12;

// "a dominates b": component-wise >= and strictly > on the last attribute.
bool pareto_strict(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] < b[i] - kCmpEps) return false;
    return !a.empty() && a.back() > b.back() + kCmpEps;
}

int lexicographic(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i] + kCmpEps) return 1;
        if (a[i] < b[i] - kCmpEps) return -1;
    }
    return 0;
}

}  // namespace

PreferenceResult compare_tuples(const std::vector<double>& a, const std::vector<double>& b,
                                const std::string& comparator, const std::vector<double>& weights) {
    if (a.size() != b.size()) throw Error("label tuples differ in length");
    auto names = comparator_names();
    if (std::find(names.begin(), names.end(), comparator) == names.end()) throw UnknownComparator(comparator);
    bool equal = lexicographic(a, b) == 0;
    if (equal) return PreferenceResult::Both;
    if (comparator == "pareto-strict") {
        if (pareto_strict(a, b)) return PreferenceResult::A;
        if (pareto_strict(b, a)) return PreferenceResult::B;
        return PreferenceResult::Incomparable;
    }
    if (comparator == "lexicographic") return lexicographic(a, b) > 0 ? PreferenceResult::A : PreferenceResult::B;
    if (comparator == "weighted-sum") {
        if (!weights.empty() && weights.size() != a.size())
            throw Error("expected " + std::to_string(a.size()) + " weights, got " + std::to_string(weights.size()));
        double sa = 0, sb = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double w = weights.empty() ? 1.0 / static_cast<double>(a.size()) : weights[i];
            sa += w * a[i];
            sb += w * b[i];
        }
        if (sa > sb + kCmpEps) return PreferenceResult::A;
        if (sb > sa + kCmpEps) return PreferenceResult::B;
        return PreferenceResult::Both;
    }
    throw UnknownComparator(comparator);
}

PreferenceRecord prefer(const LabelingSolution& sol, const ArgGraph& g, const EquationSystem& sys,
                        const Literal& a, const Literal& b, const std::string& comparator,
                        const std::vector<double>& weights) {
    auto names = comparator_names();
    if (std::find(names.begin(), names.end(), comparator) == names.end()) throw UnknownComparator(comparator);
    auto tuple = [&](const Literal& lit) {
        const auto* node = g.find(lit);
        if (!node) throw UnknownClaim(lit.str());
        std::vector<double> w;
        for (std::size_t i = 0; i < sys.attribute_count(); ++i) w.push_back(sol.weak(i, node->key));
        return w;
    };
    auto ta = tuple(a);
    auto tb = tuple(b);
    return {a.str(), b.str(), compare_tuples(ta, tb, comparator, weights), comparator};
}

}  // namespace laf
