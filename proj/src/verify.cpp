#include "priograph/verify.hpp"

#include <algorithm>

#include <httplib.h>

namespace priograph::verify {

void FactSource::validate() const {
    if (id.empty()) fail(ErrorCode::invalid_field, "fact source id empty");
    switch (kind) {
    case SourceKind::local_kb:
        if (kb_path.empty()) fail(ErrorCode::invalid_field, "local_kb source needs kb_path");
        if (!endpoint.empty()) fail(ErrorCode::invalid_field, "local_kb source carries endpoint");
        break;
    case SourceKind::remote:
        if (endpoint.empty()) fail(ErrorCode::invalid_field, "remote source needs endpoint");
        if (!kb_path.empty()) fail(ErrorCode::invalid_field, "remote source carries kb_path");
        break;
    }
}

std::vector<Claim> extract_premises(const Context& ctx) {
    std::vector<Claim> premises;
    for (const auto& claim : ctx.environment_claims)
        if (claim.verifiable) premises.push_back(claim);
    return premises;
}

std::vector<KbEntry> load_kb(const std::string& path) {
    json j = load_json_file(path);
    auto entries = j.at("entries").get<std::vector<KbEntry>>();
    for (auto& entry : entries) entry.key = to_lower(entry.key);
    return entries;
}

namespace {

struct SourceAnswer {
    VerdictStatus status = VerdictStatus::unverifiable;
    std::string evidence;
};

SourceAnswer query_local_kb(const FactSource& source, const Claim& claim) {
    auto entries = load_kb(source.kb_path);
    for (const auto& entry : entries) {
        bool matched = std::find(claim.subject_keys.begin(), claim.subject_keys.end(),
                                 entry.key) != claim.subject_keys.end();
        if (!matched) continue;
        return {entry.stance == Stance::supports ? VerdictStatus::supported
                                                 : VerdictStatus::contradicted,
                entry.evidence};
    }
    return {};
}

SourceAnswer query_remote(const FactSource& source, const Claim& claim) {
    auto scheme_end = source.endpoint.find("://");
    if (scheme_end == std::string::npos)
        fail(ErrorCode::invalid_field, "bad endpoint: " + source.endpoint);
    auto path_start = source.endpoint.find('/', scheme_end + 3);
    std::string host = source.endpoint.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : source.endpoint.substr(path_start);

    httplib::Client client(host);
    client.set_connection_timeout(0, source.timeout_ms * 1000);
    client.set_read_timeout(0, source.timeout_ms * 1000);
    json body{{"claim", claim}};
    auto result = client.Post(path, body.dump(), "application/json");
    if (!result || result->status != 200)
        fail(ErrorCode::io_error, "fact source '" + source.id + "' unreachable");
    try {
        json response = json::parse(result->body);
        std::string status = response.at("status").get<std::string>();
        SourceAnswer answer;
        answer.evidence = response.value("evidence", "");
        if (status == "supported")
            answer.status = VerdictStatus::supported;
        else if (status == "contradicted")
            answer.status = VerdictStatus::contradicted;
        else if (status == "unverifiable")
            answer.status = VerdictStatus::unverifiable;
        else
            fail(ErrorCode::malformed_response, "bad status '" + status + "'");
        return answer;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(ErrorCode::malformed_response, std::string("bad fact-source response: ") + e.what());
    }
}

} // namespace

Verdict verify_claim(const Claim& claim, const std::vector<FactSource>& sources) {
    if (!claim.verifiable) fail(ErrorCode::invalid_field, "claim '" + claim.id + "' not verifiable");

    Verdict verdict;
    verdict.claim_id = claim.id;
    std::string failures;
    for (const auto& source : sources) {
        SourceAnswer answer;
        try {
            source.validate();
            answer = source.kind == SourceKind::local_kb ? query_local_kb(source, claim)
                                                         : query_remote(source, claim);
        } catch (const Error& e) {
            failures += "[source '" + source.id + "' failed: " + e.what() + "] ";
            continue;
        }
        if (answer.status == VerdictStatus::unverifiable) continue;
        verdict.status = answer.status;
        verdict.source_id = source.id;
        verdict.evidence = failures + answer.evidence;
        return verdict;
    }
    verdict.status = VerdictStatus::unverifiable;
    verdict.evidence = failures + "no matching entry in any source";
    return verdict;
}

std::pair<PriorityGraph, VerificationReport> effective_graph(
    const Context& ctx, const oracle::OracleSpec& spec, const std::vector<FactSource>& sources,
    const PriorityGraph& g_default, const VerificationPolicy& policy,
    const graph::MeasurementPolicy& build_policy) {
    VerificationReport report;
    report.context_id = ctx.id;

    bool revert = false, block = false;
    std::map<std::string, Criticality> criticality;
    for (const auto& claim : ctx.environment_claims) criticality[claim.id] = claim.criticality;

    for (const auto& claim : extract_premises(ctx)) {
        Verdict verdict = verify_claim(claim, sources);
        switch (verdict.status) {
        case VerdictStatus::contradicted:
            (policy.on_contradicted == OnContradicted::block ? block : revert) = true;
            break;
        case VerdictStatus::unverifiable: {
            OnUnverifiable action = claim.criticality == Criticality::critical
                                        ? policy.on_unverifiable_critical
                                        : policy.on_unverifiable_supporting;
            if (action == OnUnverifiable::revert) revert = true;
            break;
        }
        case VerdictStatus::supported:
            break;
        }
        report.verdicts.push_back(std::move(verdict));
    }

    if (block) {
        report.outcome = VerificationOutcome::blocked;
        report.effective_graph_id = g_default.context_id;
        return {g_default, report};
    }
    if (revert) {
        report.outcome = VerificationOutcome::reverted_to_default;
        report.effective_graph_id = g_default.context_id;
        return {g_default, report};
    }

    PriorityGraph trusted = graph::build_graph(g_default.nodes, ctx, spec, build_policy);
    report.outcome = VerificationOutcome::context_trusted;
    report.effective_graph_id = trusted.context_id;
    return {trusted, report};
}

void to_json(json& j, const FactSource& v) {
    j = json{{"id", v.id}, {"kind", v.kind}};
    if (v.kind == SourceKind::local_kb) j["kb_path"] = v.kb_path;
    if (v.kind == SourceKind::remote) {
        j["endpoint"] = v.endpoint;
        j["timeout_ms"] = v.timeout_ms;
    }
}

void from_json(const json& j, FactSource& v) {
    v = {};
    v.id = j.at("id").get<std::string>();
    v.kind = parse_enum<SourceKind>(j.at("kind"), "source kind");
    v.kb_path = j.value("kb_path", "");
    v.endpoint = j.value("endpoint", "");
    v.timeout_ms = j.value("timeout_ms", 5000);
    v.validate();
}

void to_json(json& j, const KbEntry& v) {
    j = json{{"key", v.key}, {"stance", v.stance}, {"evidence", v.evidence}};
}

void from_json(const json& j, KbEntry& v) {
    v.key = to_lower(j.at("key").get<std::string>());
    v.stance = parse_enum<Stance>(j.at("stance"), "stance");
    v.evidence = j.value("evidence", "");
}

void to_json(json& j, const VerificationPolicy& v) {
    j = json{{"on_contradicted", v.on_contradicted},
             {"on_unverifiable_critical", v.on_unverifiable_critical},
             {"on_unverifiable_supporting", v.on_unverifiable_supporting}};
}

void from_json(const json& j, VerificationPolicy& v) {
    v.on_contradicted = j.value("on_contradicted", OnContradicted::revert);
    v.on_unverifiable_critical = j.value("on_unverifiable_critical", OnUnverifiable::revert);
    v.on_unverifiable_supporting = j.value("on_unverifiable_supporting", OnUnverifiable::allow);
}

void to_json(json& j, const VerificationReport& v) {
    j = json{{"context_id", v.context_id},
             {"verdicts", v.verdicts},
             {"outcome", v.outcome},
             {"effective_graph_id", v.effective_graph_id}};
}

void from_json(const json& j, VerificationReport& v) {
    v.context_id = j.at("context_id").get<std::string>();
    v.verdicts = j.value("verdicts", std::vector<Verdict>{});
    v.outcome = j.at("outcome").get<VerificationOutcome>();
    v.effective_graph_id = j.value("effective_graph_id", "");
}

} // namespace priograph::verify
