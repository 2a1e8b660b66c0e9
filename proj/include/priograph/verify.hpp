#pragma once

#include <string>
#include <vector>

#include "priograph/core.hpp"
#include "priograph/graph.hpp"
#include "priograph/oracle.hpp"

namespace priograph::verify {

enum class SourceKind { local_kb, remote };

struct FactSource {
    std::string id;
    SourceKind kind = SourceKind::local_kb;
    std::string kb_path;  // local_kb
    std::string endpoint; // remote
    int timeout_ms = 5000;

    void validate() const;
    bool operator==(const FactSource&) const = default;
};

enum class Stance { supports, contradicts };

struct KbEntry {
    std::string key;
    Stance stance = Stance::supports;
    std::string evidence;

    bool operator==(const KbEntry&) const = default;
};

enum class OnContradicted { revert, block };
enum class OnUnverifiable { revert, allow };

struct VerificationPolicy {
    OnContradicted on_contradicted = OnContradicted::revert;
    OnUnverifiable on_unverifiable_critical = OnUnverifiable::revert;
    OnUnverifiable on_unverifiable_supporting = OnUnverifiable::allow;

    bool operator==(const VerificationPolicy&) const = default;
};

enum class VerificationOutcome { context_trusted, reverted_to_default, blocked };

struct VerificationReport {
    std::string context_id;
    std::vector<Verdict> verdicts;
    VerificationOutcome outcome = VerificationOutcome::context_trusted;
    std::string effective_graph_id;

    bool operator==(const VerificationReport&) const = default;
};

/// Verifiable environment claims of a context, in declaration order.
std::vector<Claim> extract_premises(const Context& ctx);

Verdict verify_claim(const Claim& claim, const std::vector<FactSource>& sources);

/// Verifies the context's premises; on failure returns g_default with a
/// reverted/blocked report, otherwise builds and returns G_C.
std::pair<PriorityGraph, VerificationReport> effective_graph(
    const Context& ctx, const oracle::OracleSpec& spec, const std::vector<FactSource>& sources,
    const PriorityGraph& g_default, const VerificationPolicy& policy,
    const graph::MeasurementPolicy& build_policy);

std::vector<KbEntry> load_kb(const std::string& path);

NLOHMANN_JSON_SERIALIZE_ENUM(SourceKind, {
    {SourceKind::local_kb, "local_kb"},
    {SourceKind::remote, "remote"},
})
NLOHMANN_JSON_SERIALIZE_ENUM(Stance, {
    {Stance::supports, "supports"},
    {Stance::contradicts, "contradicts"},
})
NLOHMANN_JSON_SERIALIZE_ENUM(OnContradicted, {
    {OnContradicted::revert, "revert"},
    {OnContradicted::block, "block"},
})
NLOHMANN_JSON_SERIALIZE_ENUM(OnUnverifiable, {
    {OnUnverifiable::revert, "revert"},
    {OnUnverifiable::allow, "allow"},
})
NLOHMANN_JSON_SERIALIZE_ENUM(VerificationOutcome, {
    {VerificationOutcome::context_trusted, "context_trusted"},
    {VerificationOutcome::reverted_to_default, "reverted_to_default"},
    {VerificationOutcome::blocked, "blocked"},
})

void to_json(json& j, const FactSource& v);
void from_json(const json& j, FactSource& v);
void to_json(json& j, const KbEntry& v);
void from_json(const json& j, KbEntry& v);
void to_json(json& j, const VerificationPolicy& v);
void from_json(const json& j, VerificationPolicy& v);
void to_json(json& j, const VerificationReport& v);
void from_json(const json& j, VerificationReport& v);

} // namespace priograph::verify
