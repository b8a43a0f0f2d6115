#include "laf/algebra.hpp"

#include "laf/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

namespace laf {
namespace {

LabelValue clamp01(LabelValue v) { return std::clamp(v, 0.0, 1.0); }

LabelAlgebra make_trust() {
    LabelAlgebra alg;
    alg.name = "trust-product";
    alg.support = [](LabelValue a, LabelValue b) { return clamp01(a * b); };
    alg.aggregate = [](LabelValue a, LabelValue b) { return clamp01(a + b - a * b); };
    alg.conflict = [](LabelValue a, LabelValue b) -> LabelValue {
        if (a == 1.0 && b < 1.0) return 1.0;
        if (a >= b && b != 1.0) return clamp01((a - b) / (1.0 - b));
        return 0.0;
    };
    return alg;
}

LabelAlgebra make_pref() {
    LabelAlgebra alg;
    alg.name = "pref-lukasiewicz";
    alg.support = [](LabelValue a, LabelValue b) { return std::min(a, b); };
    alg.aggregate = [](LabelValue a, LabelValue b) { return std::min(a + b, 1.0); };
    alg.conflict = [](LabelValue a, LabelValue b) { return std::max(a - b, 0.0); };
    return alg;
}

struct Registry {
    std::vector<const LabelAlgebra*> entries;
};

const Registry& registry() {
    static const Registry r{{&product_trust_algebra(), &lukasiewicz_preference_algebra()}};
    return r;
}

std::string fmt_triple(LabelValue a, LabelValue b, LabelValue c) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << a << ", " << b << ", " << c << ")";
    return os.str();
}

// Collects the outcome of one axiom over all samples; only the first
// counterexample is kept.
class Checker {
public:
    Checker(std::vector<AxiomResult>& out, std::string name) : out_(out) {
        AxiomResult r;
        r.axiom = std::move(name);
        out_.push_back(std::move(r));
        index_ = out_.size() - 1;
    }

    void expect(bool ok, LabelValue a, LabelValue b, LabelValue c, const char* what,
                double observed) {
        auto& r = out_[index_];
        if (ok || !r.passed) return;
        r.passed = false;
        r.a = a;
        r.b = b;
        r.c = c;
        std::ostringstream os;
        os.precision(17);
        os << what << " at " << fmt_triple(a, b, c) << ", observed " << observed;
        r.detail = os.str();
    }

private:
    std::vector<AxiomResult>& out_;
    std::size_t index_;
};

}  // namespace

const LabelAlgebra& product_trust_algebra() {
    static const LabelAlgebra alg = make_trust();
    return alg;
}

const LabelAlgebra& lukasiewicz_preference_algebra() {
    static const LabelAlgebra alg = make_pref();
    return alg;
}

const LabelAlgebra& algebra_by_name(std::string_view name) {
    for (const auto* alg : registry().entries)
        if (alg->name == name) return *alg;
    throw UnknownAlgebra(std::string(name));
}

bool has_algebra(std::string_view name) {
    const auto& e = registry().entries;
    return std::any_of(e.begin(), e.end(), [&](const auto* a) { return a->name == name; });
}

std::vector<std::string> algebra_names() {
    std::vector<std::string> names;
    for (const auto* alg : registry().entries) names.push_back(alg->name);
    return names;
}

std::string attribute_label(std::string_view algebra_name) {
    auto dash = algebra_name.find('-');
    return std::string(algebra_name.substr(0, dash));
}

bool AxiomReport::all_passed() const {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

const AxiomResult* AxiomReport::find(std::string_view axiom) const {
    for (const auto& r : results)
        if (r.axiom == axiom) return &r;
    return nullptr;
}

AxiomReport check_axioms(const LabelAlgebra& alg, std::size_t samples, double tol,
                         std::uint64_t seed) {
    AxiomReport report;
    report.algebra = alg.name;

    std::vector<std::array<LabelValue, 3>> triples;
    constexpr std::array<LabelValue, 3> corners{0.0, 0.5, 1.0};
    for (auto a : corners)
        for (auto b : corners)
            for (auto c : corners) triples.push_back({a, b, c});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < samples; ++i) triples.push_back({unit(rng), unit(rng), unit(rng)});
    report.samples = triples.size();

    auto& out = report.results;
    const auto& top = alg.top;
    const auto& bot = alg.bottom;
    const double residual_tol = std::max(tol, kResidualMargin);

    Checker closure(out, "closure");
    Checker order_refl(out, "order.reflexive");
    Checker order_anti(out, "order.antisymmetric");
    Checker order_trans(out, "order.transitive");
    Checker order_bounds(out, "order.bounds");

    struct MonoidChecks {
        Checker comm, assoc, mono, neutral;
    };
    auto monoid = [&](const std::string& prefix, const char* neutral_name) {
        return MonoidChecks{Checker(out, prefix + ".commutative"), Checker(out, prefix + ".associative"),
                            Checker(out, prefix + ".monotone"),
                            Checker(out, prefix + "." + neutral_name)};
    };
    auto sup = monoid("support", "neutral-top");
    auto agg = monoid("aggregate", "neutral-bottom");

    Checker c_bounded(out, "conflict.bounded");
    Checker c_bottom(out, "conflict.bottom-when-dominated");
    Checker c_mono(out, "conflict.monotone-first");
    Checker c_anti(out, "conflict.antitone-second");
    Checker c_neutral(out, "conflict.neutral-bottom");
    Checker c_indisc(out, "conflict.indiscernible");
    Checker c_residual(out, "conflict.residual");

    auto in_range = [&](double v) { return v >= bot - tol && v <= top + tol; };

    for (const auto& [a, b, c] : triples) {
        for (const auto* op : {&alg.support, &alg.aggregate, &alg.conflict}) {
            double v = (*op)(a, b);
            closure.expect(in_range(v), a, b, c, "result outside [bottom, top]", v);
        }

        order_refl.expect(alg.leq(a, a), a, b, c, "a <= a fails", a);
        order_anti.expect(!(alg.leq(a, b) && alg.leq(b, a)) || a == b, a, b, c,
                          "a <= b and b <= a with a != b", a - b);
        order_trans.expect(!(alg.leq(a, b) && alg.leq(b, c)) || alg.leq(a, c), a, b, c,
                           "a <= b <= c but not a <= c", c - a);
        order_bounds.expect(alg.leq(bot, a) && alg.leq(a, top), a, b, c,
                            "label outside [bottom, top]", a);

        auto lo = std::min(a, b), hi = std::max(a, b);
        auto check_monoid = [&](MonoidChecks& m, const BinaryOp& op, LabelValue neutral) {
            double ab = op(a, b), ba = op(b, a);
            m.comm.expect(std::abs(ab - ba) <= tol, a, b, c, "a*b != b*a", ab - ba);
            double l = op(op(a, b), c), r = op(a, op(b, c));
            m.assoc.expect(std::abs(l - r) <= tol, a, b, c, "(a*b)*c != a*(b*c)", l - r);
            double ml = op(lo, c), mh = op(hi, c);
            m.mono.expect(ml <= mh + tol, a, b, c, "min(a,b)*c > max(a,b)*c", ml - mh);
            double n = op(a, neutral);
            m.neutral.expect(std::abs(n - a) <= tol, a, b, c, "a*neutral != a", n - a);
        };
        check_monoid(sup, alg.support, top);
        check_monoid(agg, alg.aggregate, bot);

        const auto& minus = alg.conflict;
        double ab = minus(a, b);
        if (b < a) c_bounded.expect(ab <= a + tol, a, b, c, "a (-) b > a", ab);
        if (b >= a) c_bottom.expect(std::abs(ab - bot) <= tol, a, b, c, "a (-) b != bottom when b >= a", ab);
        double ml = minus(lo, c), mh = minus(hi, c);
        c_mono.expect(ml <= mh + tol, a, b, c, "conflict not monotone in first argument", ml - mh);
        double al = minus(c, lo), ah = minus(c, hi);
        c_anti.expect(ah <= al + tol, a, b, c, "conflict not antitone in second argument", ah - al);
        double an = minus(a, bot);
        c_neutral.expect(std::abs(an - a) <= tol, a, b, c, "a (-) bottom != a", an - a);
        for (auto [x, y] : {std::pair{a, b}, std::pair{a, a}}) {
            double xy = minus(x, y), yx = minus(y, x);
            if (std::abs(xy - bot) <= tol && std::abs(yx - bot) <= tol)
                c_indisc.expect(std::abs(x - y) <= tol, x, y, c,
                                "a (-) b = b (-) a = bottom but a != b", x - y);
        }
        double sum = alg.aggregate(a, b);
        if (sum <= top - kResidualMargin) {
            double back = minus(sum, b);
            c_residual.expect(std::abs(back - a) <= residual_tol, a, b, c,
                              "((a (+) b) (-) b) != a", back - a);
        }
    }
    return report;
}

}  // namespace laf
