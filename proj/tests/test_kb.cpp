#include "laf/error.hpp"
#include "laf/graph.hpp"
#include "laf/kb.hpp"

#include "support/random_kb.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace laf;

namespace {

const char* kHeader = "algebras trust-product, pref-lukasiewicz\n";

KnowledgeBase houses() { return parse_kb_file(LAF_TEST_DATA "/houses.laf"); }

template <class E>
E expect_error(const std::string& text) {
    try {
        parse_kb(text);
    } catch (const E& e) {
        return e;
    } catch (const std::exception& e) {
        ADD_FAILURE() << "wrong exception: " << e.what();
        throw;
    }
    ADD_FAILURE() << "no exception for:\n" << text;
    throw std::logic_error("no exception");
}

}  // namespace

TEST(Parse, FactWithValuation) {
    auto kb = parse_kb(std::string(kHeader) + "fact basicServices(houseA) : {0.75; 0.95}\n");
    ASSERT_EQ(kb.formulas.size(), 1u);
    const auto& f = kb.formulas[0];
    EXPECT_FALSE(f.is_rule());
    EXPECT_EQ(f.conclusion().str(), "basicServices(houseA)");
    ASSERT_EQ(f.valuation.size(), 2u);
    EXPECT_EQ(f.valuation[0], ValuationComponent::point(0.75));
    EXPECT_EQ(f.valuation[1], ValuationComponent::point(0.95));
    EXPECT_EQ(f.pos.line, 2u);
}

TEST(Parse, SchematicRule) {
    auto kb = parse_kb(std::string(kHeader) + "rule r1: buy(X) -< goodArea(X) : {0.85; 1}\n");
    ASSERT_EQ(kb.rule_count(), 1u);
    const auto* r = kb.formulas[0].rule();
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(kb.formulas[0].id, "r1");
    EXPECT_EQ(r->head.str(), "buy(X)");
    ASSERT_EQ(r->premises.size(), 1u);
    EXPECT_EQ(r->premises[0].str(), "goodArea(X)");
    EXPECT_FALSE(kb.is_ground());
}

TEST(Parse, IntervalComponent) {
    auto kb = parse_kb(std::string(kHeader) + "fact gangOperate(houseA) : {[0,0.5]; 1}\n");
    const auto& v = kb.formulas[0].valuation;
    EXPECT_EQ(v[0], ValuationComponent::range(0, 0.5));
    EXPECT_TRUE(v[0].interval);
    EXPECT_EQ(v[1], ValuationComponent::point(1));
}

TEST(Parse, EmptyInput) {
    auto kb = parse_kb("");
    EXPECT_TRUE(kb.formulas.empty());
    EXPECT_TRUE(kb.algebras.empty());
    EXPECT_TRUE(parse_kb("  # only a comment\n\n").formulas.empty());
}

TEST(Parse, NegationAndObjectives) {
    auto kb = parse_kb(std::string(kHeader) +
                       "fact ~p(a) : {0.5; 0.5}\n"
                       "rule r: q(a) -< ~p(a) : {1; 1}\n"
                       "maximize q(a) : 1\n"
                       "minimize ~p(a) : 0\n");
    EXPECT_TRUE(kb.formulas[0].conclusion().negated);
    ASSERT_EQ(kb.objectives.size(), 2u);
    EXPECT_EQ(kb.objectives[0].direction, Direction::Maximize);
    EXPECT_EQ(kb.objectives[0].attribute, 1u);
    EXPECT_EQ(kb.objectives[1].direction, Direction::Minimize);
}

TEST(Parse, HousesFixture) {
    auto kb = houses();
    EXPECT_EQ(kb.algebras, (std::vector<std::string>{"trust-product", "pref-lukasiewicz"}));
    EXPECT_EQ(kb.rule_count(), 21u);
    EXPECT_EQ(kb.fact_count(), 17u);
    EXPECT_EQ(kb.objectives.size(), 2u);
    EXPECT_EQ(attribute_labels(kb.algebras), (std::vector<std::string>{"trust", "pref"}));
}

TEST(ParseErrors, Syntax) {
    auto e = expect_error<SyntaxError>(std::string(kHeader) + "fact p(a : {1; 1}\n");
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 0u);
    expect_error<SyntaxError>(std::string(kHeader) + "fcat p(a) : {1; 1}\n");
    expect_error<SyntaxError>(std::string(kHeader) + "fact p(X) : {1; 1}\n");
    expect_error<SyntaxError>(std::string(kHeader) + "fact ~~p(a) : {1; 1}\n");
    expect_error<SyntaxError>(std::string(kHeader) + "maximize p(a) : 2\n");
    expect_error<SyntaxError>("algebras trust-product, nope\n");
    expect_error<SyntaxError>(std::string(kHeader) + kHeader);
}

TEST(ParseErrors, DuplicateId) {
    auto e = expect_error<DuplicateId>(std::string(kHeader) +
                                       "rule r1: p(a) -< q(a) : {1; 1}\n"
                                       "rule r1: s(a) -< q(a) : {1; 1}\n");
    EXPECT_EQ(e.line(), 3u);
    expect_error<DuplicateId>(std::string(kHeader) + "fact q(a) : {1; 1}\nfact q(a) : {0.5; 1}\n");
}

TEST(ParseErrors, ArityMismatch) {
    auto e = expect_error<ArityMismatch>(std::string(kHeader) + "fact p(a) : {1; 1}\nfact ~p(a, b) : {1; 1}\n");
    EXPECT_EQ(e.line(), 3u);
}

TEST(ParseErrors, BadValuation) {
    expect_error<BadValuation>(std::string(kHeader) + "fact p(a) : {1}\n");
    expect_error<BadValuation>(std::string(kHeader) + "fact p(a) : {1.5; 1}\n");
    expect_error<BadValuation>(std::string(kHeader) + "fact p(a) : {[0.6,0.2]; 1}\n");
    expect_error<BadValuation>("fact p(a) : {1; 1}\n");
}

TEST(Print, RoundTripIsAFixpoint) {
    auto kb = houses();
    auto text = print_kb(kb);
    auto again = parse_kb(text);
    EXPECT_EQ(again, kb);
    EXPECT_EQ(print_kb(again), text);
}

TEST(Print, RoundTripOnRandomKbs) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        auto kb = parse_kb(laf::testing::random_kb_text(rng, {.objectives = true}));
        EXPECT_EQ(parse_kb(print_kb(kb)), kb);
    }
}

TEST(Print, Numbers) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1), "1");
    EXPECT_EQ(format_valuation({ValuationComponent::range(0, 0.5), ValuationComponent::point(1)}), "{[0,0.5]; 1}");
}

TEST(Literals, ParseAndKeys) {
    auto l = parse_literal("~goodArea(houseA)");
    EXPECT_TRUE(l.negated);
    EXPECT_EQ(l.str(), "~goodArea(houseA)");
    EXPECT_EQ(l.key(), "~goodArea/1(houseA)");
    EXPECT_EQ(l.signature(), "goodArea/1");
    EXPECT_EQ(l.complement().str(), "goodArea(houseA)");
    EXPECT_EQ(l.complement().complement(), l);
    EXPECT_THROW(parse_literal("p(a"), SyntaxError);
    EXPECT_EQ(split_literals("a(x, y), b ,c(z)"), (std::vector<std::string>{"a(x, y)", "b", "c(z)"}));
}

TEST(Ground, InstancesPerConstant) {
    auto g = ground(houses());
    EXPECT_TRUE(g.is_ground());
    EXPECT_NE(g.find("r1@(houseA)"), nullptr);
    EXPECT_NE(g.find("r1@(houseB)"), nullptr);
    EXPECT_EQ(g.find("r1"), nullptr);
    EXPECT_EQ(g.find("r1@(houseA)")->rule()->head.str(), "buy(houseA)");
}

TEST(Ground, GroundKbUnchanged) {
    auto kb = parse_kb_file(LAF_TEST_DATA "/houses_fig5.laf");
    EXPECT_EQ(ground(kb), kb);
}

TEST(Ground, UnsatisfiablePremiseGivesNothing) {
    auto kb = parse_kb(std::string(kHeader) + "fact s(a) : {1; 1}\nrule r: p(X) -< q(X) : {1; 1}\n");
    auto g = ground(kb);
    EXPECT_EQ(g.rule_count(), 0u);
    ASSERT_FALSE(g.diagnostics.empty());
    EXPECT_NE(g.diagnostics.back().find("never fired"), std::string::npos);
}

TEST(Ground, Idempotent) {
    auto once = ground(houses());
    EXPECT_EQ(ground(once), once);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        auto kb = ground(parse_kb(laf::testing::random_kb_text(rng)));
        EXPECT_EQ(ground(kb), kb);
    }
}

TEST(Ground, PremisesAreEstablished) {
    auto g = ground(houses());
    std::set<std::string> established;
    for (const auto& f : g.formulas)
        if (!f.is_rule()) established.insert(f.conclusion().key());
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& f : g.formulas) {
            if (!f.is_rule() || established.count(f.conclusion().key())) continue;
            bool ok = true;
            for (const auto& p : f.rule()->premises) ok = ok && established.count(p.key());
            if (ok) grew = established.insert(f.conclusion().key()).second || grew;
        }
    }
    for (const auto& f : g.formulas)
        if (f.is_rule())
            for (const auto& p : f.rule()->premises) EXPECT_TRUE(established.count(p.key())) << f.id << " " << p.str();
}

TEST(Ground, MultiVariableInstanceIds) {
    auto kb = parse_kb(std::string(kHeader) +
                       "fact e(a, b) : {1; 1}\nfact e(b, c) : {1; 1}\n"
                       "rule t: path(X, Z) -< e(X, Y), e(Y, Z) : {0.5; 0.5}\n");
    auto g = ground(kb);
    ASSERT_EQ(g.rule_count(), 1u);
    EXPECT_NE(g.find("t@(a,c,b)"), nullptr);
}
