#include <doctest.h>

#include "test_support.hpp"

using namespace priograph;
using namespace testsupport;

TEST_CASE("validate_node_set accepts the three-law node set") {
    auto nodes = asimov_nodes();
    REQUIRE(nodes.size() == 3);
    CHECK(nodes[0].id == "human_safety");
    CHECK(nodes[1].id == "obedience");
    CHECK(nodes[2].id == "self_protection");
}

TEST_CASE("validate_node_set single node") {
    auto nodes = validate_node_set({value_node("solo")});
    CHECK(nodes.size() == 1);
}

TEST_CASE("validate_node_set rejects conflicting duplicate ids") {
    Node a = value_node("safety");
    Node b = value_node("safety");
    b.label = "other label";
    CHECK_THROWS_AS(validate_node_set({a, b}), Error);
    try {
        validate_node_set({a, b});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::duplicate_id);
    }
}

TEST_CASE("validate_node_set deduplicates identical nodes and normalizes case") {
    Node a = value_node("Safety");
    Node b = value_node("safety");
    b.label = a.label = "Safety";
    auto nodes = validate_node_set({a, b});
    CHECK(nodes.size() == 1);
    CHECK(nodes[0].id == "safety");
}

TEST_CASE("node with empty label is rejected") {
    Node n = value_node("x");
    n.label = "";
    CHECK_THROWS_AS(validate_node_set({n}), Error);
}

TEST_CASE("tier external requires kind instruction") {
    Node n = value_node("doc");
    n.tier = NodeTier::external;
    CHECK_THROWS_AS(n.validate(), Error);
    n.kind = NodeKind::instruction;
    CHECK_NOTHROW(n.validate());
}

TEST_CASE("normalize_distribution") {
    SUBCASE("symmetric") {
        auto d = normalize_distribution(1, 1, 0);
        CHECK(d.p_first == doctest::Approx(0.5));
        CHECK(d.p_second == doctest::Approx(0.5));
        CHECK(d.p_abstain == doctest::Approx(0.0));
    }
    SUBCASE("weights") {
        auto d = normalize_distribution(7, 3, 0);
        CHECK(d.p_first == doctest::Approx(0.7));
        CHECK(d.p_second == doctest::Approx(0.3));
    }
    SUBCASE("all zero") {
        CHECK_THROWS_AS(normalize_distribution(0, 0, 0), Error);
    }
    SUBCASE("negative") {
        CHECK_THROWS_AS(normalize_distribution(-1, 2, 0), Error);
    }
}

TEST_CASE("context validation") {
    Context ctx = empty_context("c");
    ctx.history.push_back({"user", "hello"});
    CHECK_NOTHROW(ctx.validate());
    ctx.history.push_back({"narrator", "boom"});
    CHECK_THROWS_AS(ctx.validate(), Error);
}

TEST_CASE("duplicate claim ids within a context are rejected") {
    Context ctx = empty_context("c");
    Claim claim{"k", "s", Criticality::supporting, false, {}};
    ctx.environment_claims = {claim, claim};
    CHECK_THROWS_AS(ctx.validate(), Error);
}

TEST_CASE("verifiable claim needs subject keys") {
    Claim claim{"k", "s", Criticality::critical, true, {}};
    CHECK_THROWS_AS(claim.validate(), Error);
    claim.subject_keys = {"key"};
    CHECK_NOTHROW(claim.validate());
}

TEST_CASE("instant round-trip") {
    std::string iso = "2025-06-01T09:30:05Z";
    CHECK(format_instant(parse_instant(iso)) == iso);
    CHECK(parse_instant("1970-01-01T00:00:00Z") == 0);
}

// Serialization round-trip is identity for every core type.
TEST_CASE("core json round-trips") {
    auto roundtrip = [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        json j = v;
        T back = j.get<T>();
        CHECK(back == v);
    };

    roundtrip(value_node("safety"));

    Context ctx = empty_context("journalist");
    ctx.user_profile["role"] = "journalist";
    ctx.history.push_back({"user", "hello"});
    ctx.timestamp = parse_instant("2025-01-01T00:00:00Z");
    ctx.environment_claims.push_back({"c1", "stmt", Criticality::critical, true, {"key"}});
    ctx.framing = "framing text";
    roundtrip(ctx);

    roundtrip(DecisionDistribution{0.7, 0.2, 0.1});
    roundtrip(MeasurementOutcome{0.9, 0.1, Relation::first_over_second, 0.8, 1.0, true});
    roundtrip(PriorityEdge{"a", "b", 0.5, 1.0});

    PriorityGraph g;
    g.context_id = "ctx";
    g.nodes = validate_node_set({value_node("a"), value_node("b")});
    g.edges = {{"a", "b", 1.0, 1.0}};
    g.build_meta = {"win_prob", 0, 42, 0.05, {}};
    roundtrip(g);

    Verdict verdict{"c1", VerdictStatus::supported, "kb", "entry found"};
    roundtrip(verdict);
    roundtrip(Verdict{"c2", VerdictStatus::unverifiable, std::nullopt, "nothing"});

    AttackResult attack;
    attack.target = {"safety", "justice_assist"};
    attack.base_context_id = "neutral";
    attack.adversarial_context = ctx;
    attack.flipped_edges = {{"safety", "justice_assist"}};
    attack.trials_used = 1;
    attack.success = true;
    roundtrip(attack);
}

TEST_CASE("unknown enum strings are rejected") {
    json j = value_node("a");
    j["kind"] = "aesthetic";
    CHECK_THROWS_AS(j.get<Node>(), Error);
}

TEST_CASE("verdict with supported status requires a source") {
    Verdict v{"c", VerdictStatus::supported, std::nullopt, ""};
    CHECK_THROWS_AS(v.validate(), Error);
}
