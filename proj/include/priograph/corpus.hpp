#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "priograph/core.hpp"
#include "priograph/graph.hpp"
#include "priograph/oracle.hpp"

namespace priograph::corpus {

enum class ConflictType { instruction, information, ethics, value, preference };

/// One pairwise conflict scenario with its decision context. Variants,
/// when present, are alternative contexts used for flip reporting.
struct ScenarioRecord {
    std::string id;
    ConflictType conflict_type = ConflictType::instruction;
    std::string description;
    Node option_a;
    Node option_b;
    Context context;
    std::vector<Context> context_variants;
    bool irreducible = false;

    void validate() const;
    bool operator==(const ScenarioRecord&) const = default;
};

struct Tally {
    int a_wins = 0;
    int b_wins = 0;
    int indeterminate = 0;

    bool operator==(const Tally&) const = default;
};

struct ScenarioResult {
    std::string scenario_id;
    std::optional<MeasurementOutcome> outcome;
    std::string error; // empty on success

    bool operator==(const ScenarioResult&) const = default;
};

struct SuiteReport {
    std::vector<ScenarioResult> results;
    std::map<std::string, Tally> tallies; // keyed by conflict type name
    // scenario id -> variant context ids whose relation differs from the
    // base context's.
    std::map<std::string, std::vector<std::string>> flip_map;

    bool operator==(const SuiteReport&) const = default;
};

std::vector<ScenarioRecord> load_corpus(const std::string& path);
std::string serialize_corpus(const std::vector<ScenarioRecord>& scenarios);

SuiteReport run_suite(const std::vector<ScenarioRecord>& scenarios,
                      const oracle::OracleSpec& spec, const graph::MeasurementPolicy& policy);

/// Plain-text table, one row per scenario.
std::string report_table(const std::vector<ScenarioRecord>& scenarios, const SuiteReport& report);

std::string conflict_type_string(ConflictType type);

NLOHMANN_JSON_SERIALIZE_ENUM(ConflictType, {
    {ConflictType::instruction, "instruction"},
    {ConflictType::information, "information"},
    {ConflictType::ethics, "ethics"},
    {ConflictType::value, "value"},
    {ConflictType::preference, "preference"},
})

void to_json(json& j, const ScenarioRecord& v);
void from_json(const json& j, ScenarioRecord& v);
void to_json(json& j, const Tally& v);
void from_json(const json& j, Tally& v);
void to_json(json& j, const ScenarioResult& v);
void from_json(const json& j, ScenarioResult& v);
void to_json(json& j, const SuiteReport& v);
void from_json(const json& j, SuiteReport& v);

} // namespace priograph::corpus
