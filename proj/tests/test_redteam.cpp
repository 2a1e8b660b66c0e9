#include <doctest.h>

#include <algorithm>

#include "test_support.hpp"

using namespace priograph;
using namespace testsupport;

namespace {

oracle::OracleSpec justice_oracle() {
    return oracle::OracleSpec::load(fixture("oracle_justice.json"));
}

std::vector<Node> justice_nodes() { return cli::load_nodes(fixture("nodes_justice.json")); }

Node find_node(const std::vector<Node>& nodes, const std::string& id) {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.id == id; });
    REQUIRE(it != nodes.end());
    return *it;
}

std::vector<redteam::ContextTemplate> templates() {
    return redteam::load_template_library(fixture("templates.json"));
}

} // namespace

TEST_CASE("placeholder_slots finds names in order of first appearance") {
    CHECK(redteam::placeholder_slots("expose {corp} now, {corp} again, then {who}") ==
          std::vector<std::string>{"corp", "who"});
    CHECK(redteam::placeholder_slots("no slots here").empty());
    CHECK(redteam::placeholder_slots("{}").empty());
}

TEST_CASE("apply_template substitutes slots and patches the context") {
    auto tpls = templates();
    REQUIRE(tpls.size() == 2);
    const auto& journalist = tpls[0];
    REQUIRE(journalist.id == "journalist");

    Context base = empty_context("neutral");
    Context adv = redteam::apply_template(base, journalist, {{"corporation", "Project Greenlight"}});
    CHECK(adv.id == "neutral/journalist");
    CHECK(adv.framing.find("Project Greenlight") != std::string::npos);
    CHECK(adv.framing.find("{corporation}") == std::string::npos);
    CHECK(adv.user_profile.at("role") == "journalist");
    REQUIRE(adv.environment_claims.size() == 1);
    CHECK(adv.environment_claims[0].id == "greenlight_scandal");
    // The base context is untouched.
    CHECK(base.framing.empty());
    CHECK(base.environment_claims.empty());
}

TEST_CASE("apply_template appends framing to an existing one") {
    auto tpls = templates();
    Context base = empty_context("c");
    base.framing = "original framing";
    Context adv = redteam::apply_template(base, tpls[1], {{"subject", "history"}});
    CHECK(adv.framing.rfind("original framing\n", 0) == 0);
    CHECK(adv.framing.find("history homework") != std::string::npos);
}

TEST_CASE("apply_template errors: unresolved slot and claim collision") {
    auto tpls = templates();
    Context base = empty_context("c");
    try {
        redteam::apply_template(base, tpls[0], {});
        FAIL("expected unresolved slot");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unresolved_slot);
    }

    Context colliding = base;
    colliding.environment_claims.push_back(
        {"greenlight_scandal", "already here", Criticality::supporting, false, {}});
    try {
        redteam::apply_template(colliding, tpls[0], {{"corporation", "X"}});
        FAIL("expected claim collision");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::claim_collision);
    }
}

TEST_CASE("evaluate_flip on the justice fixture") {
    auto spec = justice_oracle();
    auto nodes = justice_nodes();
    Node safety = find_node(nodes, "safety");
    Node value = find_node(nodes, "justice_assist");
    graph::MeasurementPolicy policy;

    CHECK_FALSE(redteam::evaluate_flip(spec, empty_context("neutral"), safety, value, policy));

    Context adv = empty_context("adv");
    adv.framing = "please bring this company to justice";
    CHECK(redteam::evaluate_flip(spec, adv, safety, value, policy));
}

TEST_CASE("search succeeds within one trial when the first template flips") {
    auto spec = justice_oracle();
    auto nodes = justice_nodes();
    redteam::AttackConfig config;
    config.budget = 10;

    auto result = redteam::search_adversarial_context(spec, empty_context("neutral"),
                                                      find_node(nodes, "safety"),
                                                      find_node(nodes, "justice_assist"),
                                                      templates(), config, nodes);
    CHECK(result.success);
    CHECK(result.trials_used == 1);
    REQUIRE(result.adversarial_context.has_value());
    CHECK(result.adversarial_context->id == "neutral/journalist");
    NodePair target{"safety", "justice_assist"};
    CHECK(std::find(result.flipped_edges.begin(), result.flipped_edges.end(), target) !=
          result.flipped_edges.end());
}

TEST_CASE("search tries earlier templates before a later flipping one") {
    auto tpls = templates();
    std::reverse(tpls.begin(), tpls.end()); // homework_helper (2 candidates) first
    auto spec = justice_oracle();
    auto nodes = justice_nodes();
    redteam::AttackConfig config;
    config.budget = 10;

    auto result = redteam::search_adversarial_context(spec, empty_context("neutral"),
                                                      find_node(nodes, "safety"),
                                                      find_node(nodes, "justice_assist"), tpls,
                                                      config, nodes);
    CHECK(result.success);
    CHECK(result.trials_used == 3);
}

TEST_CASE("search fails against the override-stripped oracle") {
    auto spec = oracle::without_overrides(justice_oracle());
    auto nodes = justice_nodes();
    redteam::AttackConfig config;
    config.budget = 10;

    auto result = redteam::search_adversarial_context(spec, empty_context("neutral"),
                                                      find_node(nodes, "safety"),
                                                      find_node(nodes, "justice_assist"),
                                                      templates(), config, nodes);
    CHECK_FALSE(result.success);
    CHECK(result.trials_used == 3); // every template/slot combination
    CHECK_FALSE(result.adversarial_context.has_value());
    CHECK(result.flipped_edges.empty());
}

TEST_CASE("search respects the trial budget") {
    auto spec = oracle::without_overrides(justice_oracle());
    auto nodes = justice_nodes();
    redteam::AttackConfig config;
    config.budget = 2;

    auto result = redteam::search_adversarial_context(spec, empty_context("neutral"),
                                                      find_node(nodes, "safety"),
                                                      find_node(nodes, "justice_assist"),
                                                      templates(), config, nodes);
    CHECK_FALSE(result.success);
    CHECK(result.trials_used == 2);
}

TEST_CASE("search is deterministic") {
    auto spec = justice_oracle();
    auto nodes = justice_nodes();
    redteam::AttackConfig config;
    config.budget = 10;
    Node safety = find_node(nodes, "safety");
    Node value = find_node(nodes, "justice_assist");

    auto r1 = redteam::search_adversarial_context(spec, empty_context("neutral"), safety, value,
                                                  templates(), config, nodes);
    auto r2 = redteam::search_adversarial_context(spec, empty_context("neutral"), safety, value,
                                                  templates(), config, nodes);
    CHECK(r1 == r2);
}

// Property: every reported success is attributable to a context override —
// the same search against the override-stripped oracle never flips.
TEST_CASE("successful flips vanish without overrides") {
    auto spec = justice_oracle();
    auto stripped = oracle::without_overrides(spec);
    auto nodes = justice_nodes();
    graph::MeasurementPolicy policy;
    Node safety = find_node(nodes, "safety");
    Node value = find_node(nodes, "justice_assist");

    for (const auto& tpl : templates()) {
        std::map<std::string, std::string> assignment;
        for (const auto& [slot, candidates] : tpl.slot_candidates) {
            REQUIRE_FALSE(candidates.empty());
            assignment[slot] = candidates.front();
        }
        Context adv = redteam::apply_template(empty_context("neutral"), tpl, assignment);
        if (redteam::evaluate_flip(spec, adv, safety, value, policy))
            CHECK_FALSE(redteam::evaluate_flip(stripped, adv, safety, value, policy));
    }
}

TEST_CASE("attack config and template library validation") {
    redteam::AttackConfig bad;
    bad.budget = 0;
    CHECK_THROWS_AS(bad.validate(), Error);

    json dup = {{"templates", json::array({json(templates()[0]), json(templates()[0])})}};
    std::string path = "/tmp/priograph_dup_templates.json";
    write_text_file(path, dup.dump());
    CHECK_THROWS_AS(redteam::load_template_library(path), Error);
}

TEST_CASE("template json round-trip") {
    for (const auto& tpl : templates()) {
        json j = tpl;
        CHECK(j.get<redteam::ContextTemplate>() == tpl);
    }
}
