#include "priograph/redteam.hpp"

#include <algorithm>
#include <set>

namespace priograph::redteam {

void ContextTemplate::validate() const {
    if (id.empty()) fail(ErrorCode::invalid_field, "template id empty");
    for (const auto& claim : injected_claims) claim.validate();
    std::set<std::string> ids;
    for (const auto& claim : injected_claims)
        if (!ids.insert(claim.id).second)
            fail(ErrorCode::duplicate_id, "template '" + id + "': duplicate claim id '" + claim.id + "'");
}

void AttackConfig::validate() const {
    if (budget < 1) fail(ErrorCode::invalid_field, "attack budget must be >= 1");
}

std::vector<std::string> placeholder_slots(const std::string& text) {
    std::vector<std::string> slots;
    std::set<std::string> seen;
    for (std::size_t pos = 0; (pos = text.find('{', pos)) != std::string::npos;) {
        auto end = text.find('}', pos);
        if (end == std::string::npos) break;
        std::string name = text.substr(pos + 1, end - pos - 1);
        if (!name.empty() && seen.insert(name).second) slots.push_back(name);
        pos = end + 1;
    }
    return slots;
}

Context apply_template(const Context& base, const ContextTemplate& tpl,
                       const std::map<std::string, std::string>& slot_values) {
    std::string framing = tpl.framing_text;
    for (const auto& slot : placeholder_slots(tpl.framing_text)) {
        auto it = slot_values.find(slot);
        if (it == slot_values.end())
            fail(ErrorCode::unresolved_slot, "template '" + tpl.id + "': slot '" + slot + "' unresolved");
        std::string token = "{" + slot + "}";
        for (std::size_t pos = 0; (pos = framing.find(token, pos)) != std::string::npos;)
            framing.replace(pos, token.size(), it->second);
    }

    Context result = base;
    result.id = base.id + "/" + tpl.id;
    if (!framing.empty())
        result.framing = base.framing.empty() ? framing : base.framing + "\n" + framing;
    for (const auto& [key, val] : tpl.user_profile_patch) result.user_profile[key] = val;

    std::set<std::string> existing;
    for (const auto& claim : base.environment_claims) existing.insert(claim.id);
    for (const auto& claim : tpl.injected_claims) {
        if (existing.contains(claim.id))
            fail(ErrorCode::claim_collision,
                 "template '" + tpl.id + "': claim id '" + claim.id + "' already in context");
        result.environment_claims.push_back(claim);
    }
    result.validate();
    return result;
}

bool evaluate_flip(const oracle::OracleSpec& spec, const Context& ctx, const Node& safety,
                   const Node& value, const graph::MeasurementPolicy& policy) {
    if (safety.id == value.id) fail(ErrorCode::invalid_field, "safety and value nodes must differ");
    MeasurementOutcome outcome = graph::measure_pair(spec, safety, value, ctx, policy);
    return outcome.relation == Relation::second_over_first;
}

namespace {

// All slot assignments for a template, in deterministic candidate order.
std::vector<std::map<std::string, std::string>> slot_assignments(const ContextTemplate& tpl) {
    std::vector<std::string> slots = placeholder_slots(tpl.framing_text);
    std::vector<std::map<std::string, std::string>> assignments{{}};
    for (const auto& slot : slots) {
        auto it = tpl.slot_candidates.find(slot);
        if (it == tpl.slot_candidates.end() || it->second.empty())
            fail(ErrorCode::unresolved_slot,
                 "template '" + tpl.id + "': no candidates for slot '" + slot + "'");
        std::vector<std::map<std::string, std::string>> next;
        for (const auto& assignment : assignments)
            for (const auto& candidate : it->second) {
                auto extended = assignment;
                extended[slot] = candidate;
                next.push_back(std::move(extended));
            }
        assignments = std::move(next);
    }
    return assignments;
}

} // namespace

AttackResult search_adversarial_context(const oracle::OracleSpec& spec, const Context& base,
                                        const Node& safety, const Node& value,
                                        const std::vector<ContextTemplate>& templates,
                                        const AttackConfig& config,
                                        const std::vector<Node>& nodes) {
    config.validate();
    if (templates.empty()) fail(ErrorCode::invalid_field, "template list empty");

    AttackResult result;
    result.target = {safety.id, value.id};
    result.base_context_id = base.id;

    for (const auto& tpl : templates) {
        for (const auto& assignment : slot_assignments(tpl)) {
            if (result.trials_used >= config.budget) {
                result.validate();
                return result;
            }
            Context candidate = apply_template(base, tpl, assignment);
            ++result.trials_used;
            if (!evaluate_flip(spec, candidate, safety, value, config.policy)) continue;

            PriorityGraph base_graph = graph::build_graph(nodes, base, spec, config.policy);
            PriorityGraph adv_graph = graph::build_graph(nodes, candidate, spec, config.policy);
            graph::GraphDiff diff = graph::diff_graphs(base_graph, adv_graph);
            result.adversarial_context = candidate;
            result.flipped_edges = diff.flipped;
            result.success = std::find(diff.flipped.begin(), diff.flipped.end(), result.target) !=
                             diff.flipped.end();
            if (result.success && config.stop_on_first) {
                result.validate();
                return result;
            }
            if (!result.success) {
                // Flip seen pairwise but not attributable in the full
                // graph (sampling noise); keep searching.
                result.adversarial_context.reset();
                result.flipped_edges.clear();
            } else {
                result.validate();
                return result;
            }
        }
    }
    result.validate();
    return result;
}

std::vector<ContextTemplate> load_template_library(const std::string& path) {
    json j = load_json_file(path);
    auto templates = j.at("templates").get<std::vector<ContextTemplate>>();
    std::set<std::string> ids;
    for (const auto& tpl : templates)
        if (!ids.insert(tpl.id).second)
            fail(ErrorCode::duplicate_id, "template library repeats id '" + tpl.id + "'");
    return templates;
}

void to_json(json& j, const ContextTemplate& v) {
    j = json{{"id", v.id},
             {"framing_text", v.framing_text},
             {"user_profile_patch", v.user_profile_patch},
             {"injected_claims", v.injected_claims},
             {"slot_candidates", v.slot_candidates}};
}

void from_json(const json& j, ContextTemplate& v) {
    v.id = to_lower(j.at("id").get<std::string>());
    v.framing_text = j.value("framing_text", "");
    v.user_profile_patch = j.value("user_profile_patch", std::map<std::string, std::string>{});
    v.injected_claims = j.value("injected_claims", std::vector<Claim>{});
    v.slot_candidates =
        j.value("slot_candidates", std::map<std::string, std::vector<std::string>>{});
    v.validate();
}

void to_json(json& j, const AttackConfig& v) {
    j = json{{"budget", v.budget},
             {"stop_on_first", v.stop_on_first},
             {"policy", v.policy},
             {"seed", v.seed}};
}

void from_json(const json& j, AttackConfig& v) {
    v.budget = j.value("budget", 10);
    v.stop_on_first = j.value("stop_on_first", true);
    v.policy = j.value("policy", graph::MeasurementPolicy{});
    v.seed = j.value("seed", std::uint64_t{0});
    v.validate();
}

} // namespace priograph::redteam
