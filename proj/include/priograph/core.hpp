#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "priograph/errors.hpp"

namespace priograph {

using json = nlohmann::json;

std::string to_lower(std::string s);

// ISO-8601 UTC ("2025-01-01T00:00:00Z") <-> epoch seconds.
std::int64_t parse_instant(const std::string& iso);
std::string format_instant(std::int64_t epoch_seconds);

enum class NodeKind { instruction, value };
enum class NodeTier { system, user, external, intrinsic };

/// A vertex of the priority graph: an instruction or a value.
struct Node {
    std::string id;
    NodeKind kind = NodeKind::instruction;
    NodeTier tier = NodeTier::system;
    std::string label;
    std::string description;

    void validate() const;
    bool operator==(const Node&) const = default;
};

enum class Criticality { critical, supporting };

/// A structured, possibly verifiable premise embedded in a context.
struct Claim {
    std::string id;
    std::string statement;
    Criticality criticality = Criticality::supporting;
    bool verifiable = false;
    std::vector<std::string> subject_keys;

    void validate() const;
    bool operator==(const Claim&) const = default;
};

struct Turn {
    std::string role; // user | model | system | tool
    std::string text;

    bool operator==(const Turn&) const = default;
};

/// Structured decision context: who is asking, what has been said,
/// when, and which factual premises the context asserts.
struct Context {
    std::string id;
    std::map<std::string, std::string> user_profile;
    std::vector<Turn> history;
    std::int64_t timestamp = 0;
    std::vector<Claim> environment_claims;
    std::string framing;

    void validate() const;
    bool operator==(const Context&) const = default;
};

/// Probabilities over {pick-first, pick-second, abstain}; sums to 1.
struct DecisionDistribution {
    double p_first = 0.0;
    double p_second = 0.0;
    double p_abstain = 0.0;

    void validate() const;
    DecisionDistribution swapped() const { return {p_second, p_first, p_abstain}; }
    bool operator==(const DecisionDistribution&) const = default;
};

enum class Relation { first_over_second, second_over_first, indeterminate };

struct MeasurementOutcome {
    double m_first = 0.0;
    double m_second = 0.0;
    Relation relation = Relation::indeterminate;
    double margin = 0.0;
    double confidence = 0.0;
    bool exact = false;

    bool operator==(const MeasurementOutcome&) const = default;
};

struct PriorityEdge {
    std::string from;
    std::string to;
    double margin = 0.0;
    double confidence = 0.0;

    bool operator==(const PriorityEdge&) const = default;
};

using NodePair = std::pair<std::string, std::string>;

struct BuildMeta {
    std::string measurement_policy;
    int samples_per_pair = 0;
    std::uint64_t seed = 0;
    double tie_threshold = 0.0;
    std::vector<NodePair> indeterminate_pairs;

    bool operator==(const BuildMeta&) const = default;
};

/// Context-dependent directed priority graph.
struct PriorityGraph {
    std::string context_id;
    std::vector<Node> nodes; // sorted by id
    std::vector<PriorityEdge> edges;
    BuildMeta build_meta;

    void validate() const;
    bool has_node(const std::string& id) const;
    /// +1 if from->to is an edge, -1 if to->from, 0 if neither.
    int edge_direction(const std::string& from, const std::string& to) const;
    bool operator==(const PriorityGraph&) const = default;
};

enum class VerdictStatus { supported, contradicted, unverifiable };

struct Verdict {
    std::string claim_id;
    VerdictStatus status = VerdictStatus::unverifiable;
    std::optional<std::string> source_id;
    std::string evidence;

    void validate() const;
    bool operator==(const Verdict&) const = default;
};

struct AttackResult {
    NodePair target; // (safety node id, value node id)
    std::string base_context_id;
    std::optional<Context> adversarial_context;
    std::vector<NodePair> flipped_edges;
    int trials_used = 0;
    bool success = false;

    void validate() const;
    bool operator==(const AttackResult&) const = default;
};

/// Deduplicates and validates; result is sorted by id.
std::vector<Node> validate_node_set(std::vector<Node> nodes);

/// Scales three nonnegative weights into a DecisionDistribution.
DecisionDistribution normalize_distribution(double first, double second, double abstain);

NLOHMANN_JSON_SERIALIZE_ENUM(NodeKind, {
    {NodeKind::instruction, "instruction"},
    {NodeKind::value, "value"},
})
NLOHMANN_JSON_SERIALIZE_ENUM(NodeTier, {
    {NodeTier::system, "system"},
    {NodeTier::user, "user"},
    {NodeTier::external, "external"},
    {NodeTier::intrinsic, "intrinsic"},
})
NLOHMANN_JSON_SERIALIZE_ENUM(Criticality, {
    {Criticality::critical, "critical"},
    {Criticality::supporting, "supporting"},
})
NLOHMANN_JSON_SERIALIZE_ENUM(Relation, {
    {Relation::first_over_second, "first_over_second"},
    {Relation::second_over_first, "second_over_first"},
    {Relation::indeterminate, "indeterminate"},
})
NLOHMANN_JSON_SERIALIZE_ENUM(VerdictStatus, {
    {VerdictStatus::supported, "supported"},
    {VerdictStatus::contradicted, "contradicted"},
    {VerdictStatus::unverifiable, "unverifiable"},
})

/// Enum from JSON with rejection of unknown strings (the serializer
/// macro would silently map them to the first enumerator).
template <typename E>
E parse_enum(const json& j, const char* what) {
    E value = j.get<E>();
    if (json(value) != j)
        fail(ErrorCode::invalid_field, std::string("invalid ") + what + ": " + j.dump());
    return value;
}

void to_json(json& j, const Node& v);
void from_json(const json& j, Node& v);
void to_json(json& j, const Claim& v);
void from_json(const json& j, Claim& v);
void to_json(json& j, const Turn& v);
void from_json(const json& j, Turn& v);
void to_json(json& j, const Context& v);
void from_json(const json& j, Context& v);
void to_json(json& j, const DecisionDistribution& v);
void from_json(const json& j, DecisionDistribution& v);
void to_json(json& j, const MeasurementOutcome& v);
void from_json(const json& j, MeasurementOutcome& v);
void to_json(json& j, const PriorityEdge& v);
void from_json(const json& j, PriorityEdge& v);
void to_json(json& j, const BuildMeta& v);
void from_json(const json& j, BuildMeta& v);
void to_json(json& j, const PriorityGraph& v);
void from_json(const json& j, PriorityGraph& v);
void to_json(json& j, const Verdict& v);
void from_json(const json& j, Verdict& v);
void to_json(json& j, const AttackResult& v);
void from_json(const json& j, AttackResult& v);

json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace priograph
