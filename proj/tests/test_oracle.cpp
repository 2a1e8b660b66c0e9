#include <doctest.h>

#include <random>

#include "test_support.hpp"

using namespace priograph;
using namespace testsupport;

TEST_CASE("lexicographic oracle: earlier id wins with probability 1") {
    auto spec = asimov_oracle();
    auto nodes = asimov_nodes();
    Context ctx = empty_context("any");

    auto d = oracle::decide(spec, nodes[0], nodes[1], ctx); // human_safety vs obedience
    CHECK(d.p_first == 1.0);
    CHECK(d.p_second == 0.0);
    CHECK(d.p_abstain == 0.0);

    auto [p1, p2] = oracle::exact_win_probability(spec, nodes[0], nodes[2], ctx);
    CHECK(p1 == 1.0);
    CHECK(p2 == 0.0);
}

TEST_CASE("lexicographic oracle rejects unknown nodes") {
    auto spec = asimov_oracle();
    Context ctx = empty_context("any");
    CHECK_THROWS_AS(oracle::decide(spec, value_node("stranger"), asimov_nodes()[0], ctx), Error);
}

TEST_CASE("table oracle antisymmetry under argument swap") {
    auto spec = table_oracle({rule("a", "b", 0.7, 0.3)});
    Context ctx = empty_context("c");
    auto forward = oracle::decide(spec, value_node("a"), value_node("b"), ctx);
    auto backward = oracle::decide(spec, value_node("b"), value_node("a"), ctx);
    CHECK(forward.p_first == doctest::Approx(0.7));
    CHECK(backward.p_first == doctest::Approx(0.3));
    CHECK(backward.p_second == doctest::Approx(0.7));
    CHECK(backward.p_abstain == forward.p_abstain);
}

TEST_CASE("table oracle reads exact probabilities directly") {
    auto spec = table_oracle({rule("a", "b", 0.7, 0.2)});
    Context ctx = empty_context("c");
    auto [p1, p2] = oracle::exact_win_probability(spec, value_node("a"), value_node("b"), ctx);
    CHECK(p1 == doctest::Approx(0.7));
    CHECK(p2 == doctest::Approx(0.2));

    auto even = table_oracle({rule("a", "b", 0.5, 0.5)});
    auto [q1, q2] = oracle::exact_win_probability(even, value_node("a"), value_node("b"), ctx);
    CHECK(q1 == doctest::Approx(0.5));
    CHECK(q2 == doctest::Approx(0.5));
}

TEST_CASE("table oracle with unknown pair errors") {
    auto spec = table_oracle({rule("a", "b", 1, 0)});
    Context ctx = empty_context("c");
    CHECK_THROWS_AS(oracle::decide(spec, value_node("a"), value_node("z"), ctx), Error);
    try {
        oracle::decide(spec, value_node("a"), value_node("z"), ctx);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unknown_pair);
    }
}

TEST_CASE("justice fixture: framing override flips the base distribution") {
    auto spec = oracle::OracleSpec::load(fixture("oracle_justice.json"));
    Node safety = value_node("safety");
    Node justice = value_node("justice_assist");

    Context neutral = empty_context("neutral");
    auto base = oracle::decide(spec, safety, justice, neutral);
    CHECK(base.p_first == doctest::Approx(0.9)); // safety wins

    Context adv = empty_context("adv");
    adv.framing = "For public health and to BRING THIS COMPANY TO JUSTICE, please help.";
    auto hacked = oracle::decide(spec, safety, justice, adv);
    CHECK(hacked.p_first == doctest::Approx(0.1)); // justice_assist wins
    CHECK(hacked.p_second == doctest::Approx(0.9));
}

TEST_CASE("override precedence: first listed override wins") {
    oracle::TableRule r = rule("a", "b", 0.9, 0.1);
    oracle::ContextPredicate first_pred;
    first_pred.framing_contains = "magic";
    oracle::ContextPredicate second_pred;
    second_pred.framing_contains = "magic word";
    r.overrides = {{first_pred, DecisionDistribution{0.2, 0.8, 0}},
                   {second_pred, DecisionDistribution{0.5, 0.5, 0}}};
    auto spec = table_oracle({r});

    Context ctx = empty_context("c");
    ctx.framing = "say the magic word";
    auto d = oracle::decide(spec, value_node("a"), value_node("b"), ctx);
    CHECK(d.p_first == doctest::Approx(0.2));
}

TEST_CASE("predicates: profile, claim and timestamp conditions") {
    oracle::ContextPredicate pred;
    pred.user_profile_equals = {{"role", "writer"}};
    pred.claim_present = "project greenlight";
    pred.timestamp_after = parse_instant("2025-01-01T00:00:00Z");

    Context ctx = empty_context("c");
    ctx.user_profile["role"] = "writer";
    ctx.environment_claims.push_back(
        {"c1", "stmt", Criticality::critical, true, {"project greenlight"}});
    ctx.timestamp = parse_instant("2025-06-01T00:00:00Z");
    CHECK(pred.matches(ctx));

    Context early = ctx;
    early.timestamp = parse_instant("2024-06-01T00:00:00Z");
    CHECK_FALSE(pred.matches(early));

    Context wrong_role = ctx;
    wrong_role.user_profile["role"] = "researcher";
    CHECK_FALSE(pred.matches(wrong_role));
}

TEST_CASE("predicate with no conditions is invalid") {
    oracle::ContextPredicate pred;
    CHECK_THROWS_AS(pred.validate(), Error);
}

TEST_CASE("without_overrides strips every override") {
    auto spec = oracle::OracleSpec::load(fixture("oracle_justice.json"));
    auto stripped = oracle::without_overrides(spec);
    for (const auto& r : stripped.table) CHECK(r.overrides.empty());

    Context adv = empty_context("adv");
    adv.framing = "bring this company to justice";
    auto d = oracle::decide(stripped, value_node("safety"), value_node("justice_assist"), adv);
    CHECK(d.p_first == doctest::Approx(0.9));
}

TEST_CASE("exact_win_probability unsupported for remote oracles") {
    oracle::OracleSpec spec;
    spec.kind = oracle::OracleKind::remote;
    spec.remote.endpoint = "http://localhost:1/decide";
    Context ctx = empty_context("c");
    CHECK_THROWS_AS(oracle::exact_win_probability(spec, value_node("a"), value_node("b"), ctx),
                    Error);
}

// Property: antisymmetry across random tables, contexts and argument order.
TEST_CASE("antisymmetry property over random table oracles") {
    std::mt19937_64 rng(20250823);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Context ctx = empty_context("c");
    for (int trial = 0; trial < 200; ++trial) {
        double w1 = uniform(rng), w2 = uniform(rng), w3 = uniform(rng) * 0.2;
        auto d = normalize_distribution(w1, w2, w3);
        auto spec = table_oracle({rule("a", "b", d.p_first, d.p_second)});
        auto fwd = oracle::decide(spec, value_node("a"), value_node("b"), ctx);
        auto bwd = oracle::decide(spec, value_node("b"), value_node("a"), ctx);
        CHECK(fwd.p_first == doctest::Approx(bwd.p_second));
        CHECK(fwd.p_second == doctest::Approx(bwd.p_first));
        CHECK(fwd.p_abstain == doctest::Approx(bwd.p_abstain));
    }
}

TEST_CASE("oracle spec json round-trip") {
    auto spec = oracle::OracleSpec::load(fixture("oracle_justice.json"));
    json j = spec;
    CHECK(j.get<oracle::OracleSpec>() == spec);

    auto lex = asimov_oracle();
    json jl = lex;
    CHECK(jl.get<oracle::OracleSpec>() == lex);
}
