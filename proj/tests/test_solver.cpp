#include "laf/error.hpp"
#include "laf/solver.hpp"

#include "support/properties.hpp"
#include "support/random_kb.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace laf;

namespace {

struct Built {
    KnowledgeBase kb;
    ArgGraph g;
    EquationSystem sys;
};

Built build_text(const std::string& text) {
    Built b;
    b.kb = ground(parse_kb(text));
    b.g = build_graph(b.kb);
    b.sys = emit_equations(b.g, b.kb);
    return b;
}

Built build_file(const char* name) {
    std::ifstream in(std::string(LAF_TEST_DATA "/") + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return build_text(ss.str());
}

std::string key(const std::string& claim) { return parse_literal(claim).key(); }

const char* kTrust = "algebras trust-product\n";

int lemma1_violations(const Built& b, const std::map<Var, double>& v, std::string* why = nullptr) {
    return laf::testing::lemma1_violations(b.g, b.sys, v, why);
}

/// Oracle model count, or -1 past the guard.
double models_or_skip(const EquationSystem& sys) {
    try {
        return brute_force_solve(sys, 0.01).model_count;
    } catch (const TooLarge&) {
        return -1;
    }
}

}  // namespace

TEST(Solve, ConflictFreeChain) {
    auto b = build_text(std::string(kTrust) + "fact a : {0.8}\nrule r: b -< a : {0.9}\n");
    auto s = solve(b.sys);
    EXPECT_TRUE(s.converged);
    EXPECT_NEAR(s.acc(0, key("b")), 0.72, 1e-12);
    EXPECT_NEAR(s.weak(0, key("b")), 0.72, 1e-12);
    EXPECT_LE(s.max_residual, 1e-15);
    EXPECT_LE(s.iterations, 1u);
}

TEST(Solve, SymmetricTie) {
    auto b = build_text(std::string(kTrust) + "fact a : {0.7}\nfact ~a : {0.7}\n");
    auto s = solve(b.sys);
    EXPECT_EQ(s.weak(0, key("a")), 0.0);
    EXPECT_EQ(s.weak(0, key("~a")), 0.0);
}

TEST(Solve, NormalisedDifference) {
    auto b = build_text(std::string(kTrust) + "fact a : {0.9}\nfact ~a : {0.4}\n");
    auto s = solve(b.sys);
    EXPECT_NEAR(s.weak(0, key("a")), 0.5 / 0.6, 1e-9);
    EXPECT_EQ(s.weak(0, key("~a")), 0.0);
}

TEST(Solve, BlockingCycleMatchesOracle) {
    auto b = build_text(std::string(kTrust) +
                        "fact a : {0.8}\nfact b : {0.6}\n"
                        "rule r1: ~b -< a : {1}\nrule r2: ~a -< b : {1}\n");
    auto s = solve(b.sys);
    EXPECT_TRUE(s.converged);
    EXPECT_LE(s.max_residual, 1e-9);
    auto o = brute_force_solve(b.sys, 1e-3);
    EXPECT_GE(o.model_count, 1);
    EXPECT_TRUE(oracle_matches(o, s, 1e-3));
    EXPECT_EQ(lemma1_violations(b, s.assignment), 0);
}

TEST(Solve, ParamsAtMidpointOrOverride) {
    auto b = build_text(std::string(kTrust) + "fact a : {[0.2,0.6]}\n");
    EXPECT_NEAR(solve(b.sys).acc(0, key("a")), 0.4, 1e-12);
    SolverConfig cfg;
    cfg.param_overrides["p_a_trust"] = 0.25;
    EXPECT_NEAR(solve(b.sys, cfg).acc(0, key("a")), 0.25, 1e-12);
}

TEST(Solve, SameSeedSameAnswer) {
    auto b = build_file("houses.laf");
    SolverConfig cfg;
    cfg.seed = 42;
    auto x = solve(b.sys, cfg), y = solve(b.sys, cfg);
    EXPECT_EQ(x.assignment, y.assignment);
    EXPECT_EQ(x.warnings, y.warnings);
}

TEST(Solve, ConfigValidation) {
    SolverConfig cfg;
    cfg.damping = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg.damping = 1.5;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.residual_tol = -1;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(Solve, ResidualsAreExact) {
    auto b = build_file("houses_fig5.laf");
    auto s = optimize(b.sys);
    auto r = residuals(b.sys, s.assignment, s.param_values);
    ASSERT_EQ(r.size(), b.sys.equations.size());
    for (double x : r) EXPECT_LE(x, 1e-9);
}

TEST(Lemma1, RandomKbs) {
    std::mt19937_64 rng(101);
    for (int n = 0; n < 100; ++n) {
        auto text = laf::testing::random_kb_text(rng);
        auto b = build_text(text);
        auto s = solve(b.sys);
        ASSERT_LE(s.max_residual, 1e-9) << text;
        std::string why;
        EXPECT_EQ(lemma1_violations(b, s.assignment, &why), 0) << why << "\n" << text;
    }
}

TEST(Oracle, ConflictFreeHasOneModel) {
    auto b = build_text(std::string(kTrust) + "fact a : {0.8}\nrule r: b -< a : {0.9}\n");
    auto o = brute_force_solve(b.sys, 0.01);
    EXPECT_EQ(o.model_count, 1);
    ASSERT_EQ(o.models.size(), 1u);
    EXPECT_EQ(o.models[0].assignment, solve(b.sys).assignment);
}

TEST(Oracle, DirectConflictAgreesWithSolve) {
    auto b = build_text(std::string(kTrust) + "fact a : {0.9}\nfact ~a : {0.4}\n");
    auto o = brute_force_solve(b.sys, 0.001);
    EXPECT_EQ(o.model_count, 1);
    auto s = solve(b.sys);
    for (const auto& [v, x] : s.assignment) EXPECT_NEAR(o.models.at(0).assignment.at(v), x, 0.001);
}

TEST(Oracle, ThreeCycleModelsSatisfyLemma1) {
    auto b = build_text(std::string(kTrust) +
                        "fact a : {0.7}\nfact b : {0.6}\nfact c : {0.8}\n"
                        "rule r1: ~b -< a : {0.9}\nrule r2: ~c -< b : {0.9}\nrule r3: ~a -< c : {0.9}\n");
    auto o = brute_force_solve(b.sys, 0.01);
    ASSERT_FALSE(o.models.empty());
    for (const auto& m : o.models) {
        std::string why;
        EXPECT_EQ(lemma1_violations(b, m.assignment, &why), 0) << why;
    }
    EXPECT_TRUE(oracle_matches(o, solve(b.sys), 0.01));
}

TEST(Oracle, GuardRejectsLargeSystems) {
    std::string text = kTrust;
    for (int i = 0; i < 10; ++i) text += "fact q" + std::to_string(i) + " : {[0,1]}\n";
    auto b = build_text(text);
    EXPECT_THROW(brute_force_solve(b.sys, 0.1), TooLarge);
}

TEST(PrincipleP2, StrongerAttackerNeverHelpsVictim) {
    for (double base : {0.3, 0.6, 0.9}) {
        double last = 2;
        for (int k = 0; k <= 20; ++k) {
            double f = k / 20.0;
            auto b = build_text(std::string(kTrust) + "fact a : {" + std::to_string(base) + "}\nfact ~a : {" +
                                std::to_string(f) + "}\nrule r: b -< a : {0.9}\nfact ~b : {0.1}\n");
            double w = solve(b.sys).weak(0, key("b"));
            EXPECT_LE(w, last + 1e-12);
            last = w;
        }
    }
}

TEST(PrincipleP2, RandomPerturbations) {
    std::mt19937_64 rng(202);
    int checked = 0;
    for (int n = 0; n < 200 && checked < 60; ++n) {
        auto text = laf::testing::random_kb_text(rng, {.interval_prob = 0});
        auto b = build_text(text);
        for (const auto& f : b.kb.formulas) {
            if (f.is_rule()) continue;
            auto victim = f.conclusion().complement().key();
            if (!b.g.find(victim) || !b.g.incoming_ra(f.conclusion().key()).empty()) continue;
            if (models_or_skip(b.sys) != 1) continue;
            double old = f.valuation[0].lo, bumped = std::min(1.0, old + 0.2);
            auto perturbed = b.kb;
            for (auto& pf : perturbed.formulas)
                if (pf.id == f.id) pf.valuation[0] = ValuationComponent::point(bumped);
            auto g2 = build_graph(perturbed);
            auto sys2 = emit_equations(g2, perturbed);
            if (models_or_skip(sys2) != 1) continue;
            double w0 = solve(b.sys).weak(0, victim), w1 = solve(sys2).weak(0, victim);
            EXPECT_LE(w1, w0 + 1e-9) << f.id << "\n" << text;
            ++checked;
            break;
        }
    }
    EXPECT_GE(checked, 20);
}

TEST(Optimize, RunningExampleBounds) {
    auto b = build_file("houses.laf");
    auto s = optimize(b.sys);
    EXPECT_DOUBLE_EQ(s.param_values.at("p_gangOperate(houseA)_trust"), 0.5);
    EXPECT_DOUBLE_EQ(s.param_values.at("p_reinforcePolice(houseB)_trust"), 0.0);
    EXPECT_TRUE(s.converged);
    EXPECT_LE(s.max_residual, 1e-9);
    SolverConfig plain;
    plain.param_overrides = s.param_values;
    EXPECT_LE(solve(b.sys, plain).max_residual, 1e-9);
}

TEST(Optimize, IdentityObjectiveGoesToBound) {
    auto up = build_text(std::string(kTrust) + "fact a : {[0.2,0.6]}\nmaximize a : 0\n");
    EXPECT_DOUBLE_EQ(optimize(up.sys).param_values.at("p_a_trust"), 0.6);
    auto down = build_text(std::string(kTrust) + "fact a : {[0.2,0.6]}\nminimize a : 0\n");
    EXPECT_DOUBLE_EQ(optimize(down.sys).param_values.at("p_a_trust"), 0.2);
}

TEST(Optimize, VacuousObjectiveWarns) {
    auto b = build_text(std::string(kTrust) + "fact a : {0.5}\nfact c : {[0,1]}\nmaximize a : 0\n");
    auto s = optimize(b.sys);
    EXPECT_FALSE(s.warnings.empty());
    EXPECT_EQ(s.assignment, solve(b.sys).assignment);
}

TEST(Optimize, NeedsObjectives) {
    auto b = build_text(std::string(kTrust) + "fact a : {0.5}\n");
    EXPECT_THROW(optimize(b.sys), NoObjectives);
}
