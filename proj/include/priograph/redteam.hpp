#pragma once

#include <map>
#include <string>
#include <vector>

#include "priograph/core.hpp"
#include "priograph/graph.hpp"
#include "priograph/oracle.hpp"

namespace priograph::redteam {

/// A reusable context patch: framing text (with optional {slot}
/// placeholders), profile entries and injected claims.
struct ContextTemplate {
    std::string id;
    std::string framing_text;
    std::map<std::string, std::string> user_profile_patch;
    std::vector<Claim> injected_claims;
    std::map<std::string, std::vector<std::string>> slot_candidates;

    void validate() const;
    bool operator==(const ContextTemplate&) const = default;
};

struct AttackConfig {
    int budget = 10;
    bool stop_on_first = true;
    graph::MeasurementPolicy policy;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const AttackConfig&) const = default;
};

/// Names of the {slot} placeholders appearing in `text`, in order of
/// first appearance.
std::vector<std::string> placeholder_slots(const std::string& text);

Context apply_template(const Context& base, const ContextTemplate& tpl,
                       const std::map<std::string, std::string>& slot_values);

/// True iff `value` strictly beats `safety` in ctx (indeterminate is not
/// a flip).
bool evaluate_flip(const oracle::OracleSpec& spec, const Context& ctx, const Node& safety,
                   const Node& value, const graph::MeasurementPolicy& policy);

/// Enumerates templates (and their slot candidates) in order against the
/// target pair; `nodes` is the full node set used to report the flipped
/// edge set of a successful adversarial context.
AttackResult search_adversarial_context(const oracle::OracleSpec& spec, const Context& base,
                                        const Node& safety, const Node& value,
                                        const std::vector<ContextTemplate>& templates,
                                        const AttackConfig& config,
                                        const std::vector<Node>& nodes);

std::vector<ContextTemplate> load_template_library(const std::string& path);

void to_json(json& j, const ContextTemplate& v);
void from_json(const json& j, ContextTemplate& v);
void to_json(json& j, const AttackConfig& v);
void from_json(const json& j, AttackConfig& v);

} // namespace priograph::redteam
