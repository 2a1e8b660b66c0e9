#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "priograph/core.hpp"

namespace priograph::oracle {

enum class OracleKind { lexicographic, table, remote };

/// Conjunction of optional conditions on a Context; at least one must be set.
struct ContextPredicate {
    std::optional<std::pair<std::string, std::string>> user_profile_equals;
    std::optional<std::string> framing_contains; // case-insensitive substring
    std::optional<std::string> claim_present;    // matches a claim subject_key
    std::optional<std::int64_t> timestamp_after;

    void validate() const;
    bool matches(const Context& ctx) const;
    bool operator==(const ContextPredicate&) const = default;
};

/// One table entry for an unordered node pair. `base` is expressed with
/// p_first belonging to the lexicographically smaller id; overrides are
/// checked in order, first match wins.
struct TableRule {
    NodePair pair;
    DecisionDistribution base;
    std::vector<std::pair<ContextPredicate, DecisionDistribution>> overrides;

    bool operator==(const TableRule&) const = default;
};

struct RemoteConfig {
    std::string endpoint;
    int timeout_ms = 5000;
    int retries = 2;
    int backoff_ms = 500;
    int max_in_flight = 8;

    bool operator==(const RemoteConfig&) const = default;
};

struct OracleSpec {
    OracleKind kind = OracleKind::lexicographic;
    std::vector<std::string> lexicographic;
    std::vector<TableRule> table;
    RemoteConfig remote;

    void validate() const;
    static OracleSpec load(const std::string& path);
    bool operator==(const OracleSpec&) const = default;
};

/// Copy of `spec` with every table override removed.
OracleSpec without_overrides(OracleSpec spec);

DecisionDistribution decide(const OracleSpec& spec, const Node& a1, const Node& a2,
                            const Context& ctx);

/// Direct rule read, no sampling. Lexicographic and table kinds only.
std::pair<double, double> exact_win_probability(const OracleSpec& spec, const Node& a1,
                                                const Node& a2, const Context& ctx);

DecisionDistribution remote_decide(const OracleSpec& spec, const Node& a1, const Node& a2,
                                   const Context& ctx);

NLOHMANN_JSON_SERIALIZE_ENUM(OracleKind, {
    {OracleKind::lexicographic, "lexicographic"},
    {OracleKind::table, "table"},
    {OracleKind::remote, "remote"},
})

void to_json(json& j, const ContextPredicate& v);
void from_json(const json& j, ContextPredicate& v);
void to_json(json& j, const TableRule& v);
void from_json(const json& j, TableRule& v);
void to_json(json& j, const RemoteConfig& v);
void from_json(const json& j, RemoteConfig& v);
void to_json(json& j, const OracleSpec& v);
void from_json(const json& j, OracleSpec& v);

} // namespace priograph::oracle
