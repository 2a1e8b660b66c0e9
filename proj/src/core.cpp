#include "priograph/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace priograph {

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::int64_t parse_instant(const std::string& iso) {
    std::tm tm{};
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    if (std::sscanf(iso.c_str(), "%d-%d-%dT%d:%d:%dZ", &y, &mo, &d, &h, &mi, &se) != 6)
        fail(ErrorCode::parse_error, "bad instant: " + iso);
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = se;
    return static_cast<std::int64_t>(timegm(&tm));
}

std::string format_instant(std::int64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

void Node::validate() const {
    if (id.empty()) fail(ErrorCode::invalid_field, "node id empty");
    if (label.empty()) fail(ErrorCode::empty_label, "node '" + id + "' has empty label");
    if (tier == NodeTier::external && kind != NodeKind::instruction)
        fail(ErrorCode::invalid_field, "node '" + id + "': tier 'external' requires kind 'instruction'");
}

void Claim::validate() const {
    if (id.empty()) fail(ErrorCode::invalid_field, "claim id empty");
    if (verifiable && subject_keys.empty())
        fail(ErrorCode::invalid_field, "verifiable claim '" + id + "' needs subject_keys");
}

void Context::validate() const {
    if (id.empty()) fail(ErrorCode::invalid_field, "context id empty");
    static const std::set<std::string> roles = {"user", "model", "system", "tool"};
    for (const auto& turn : history)
        if (!roles.contains(turn.role))
            fail(ErrorCode::invalid_field, "context '" + id + "': bad history role '" + turn.role + "'");
    std::set<std::string> seen;
    for (const auto& claim : environment_claims) {
        claim.validate();
        if (!seen.insert(claim.id).second)
            fail(ErrorCode::duplicate_id, "context '" + id + "': duplicate claim id '" + claim.id + "'");
    }
}

void DecisionDistribution::validate() const {
    if (p_first < 0 || p_second < 0 || p_abstain < 0)
        fail(ErrorCode::invalid_field, "negative probability");
    if (std::abs(p_first + p_second + p_abstain - 1.0) > 1e-9)
        fail(ErrorCode::invalid_field, "distribution does not sum to 1");
}

void PriorityGraph::validate() const {
    std::set<std::string> ids;
    for (const auto& node : nodes) {
        node.validate();
        if (!ids.insert(node.id).second)
            fail(ErrorCode::duplicate_id, "graph: duplicate node id '" + node.id + "'");
    }
    std::set<NodePair> pairs;
    for (const auto& edge : edges) {
        if (edge.from == edge.to) fail(ErrorCode::invalid_field, "self-edge on '" + edge.from + "'");
        if (!ids.contains(edge.from) || !ids.contains(edge.to))
            fail(ErrorCode::unknown_node, "edge endpoint not in node set");
        auto key = std::minmax(edge.from, edge.to);
        if (!pairs.insert({key.first, key.second}).second)
            fail(ErrorCode::invalid_field, "two edges on pair (" + edge.from + ", " + edge.to + ")");
    }
}

bool PriorityGraph::has_node(const std::string& id) const {
    return std::any_of(nodes.begin(), nodes.end(), [&](const Node& n) { return n.id == id; });
}

int PriorityGraph::edge_direction(const std::string& from, const std::string& to) const {
    for (const auto& edge : edges) {
        if (edge.from == from && edge.to == to) return 1;
        if (edge.from == to && edge.to == from) return -1;
    }
    return 0;
}

void Verdict::validate() const {
    if (status != VerdictStatus::unverifiable && !source_id)
        fail(ErrorCode::invalid_field, "verdict for '" + claim_id + "': status needs a source_id");
}

void AttackResult::validate() const {
    bool target_flipped = std::find(flipped_edges.begin(), flipped_edges.end(), target) !=
                          flipped_edges.end();
    if (success != (adversarial_context.has_value() && target_flipped))
        fail(ErrorCode::invalid_field, "attack result: success flag inconsistent");
}

std::vector<Node> validate_node_set(std::vector<Node> nodes) {
    if (nodes.empty()) fail(ErrorCode::invalid_field, "empty node list");
    for (auto& node : nodes) {
        node.id = to_lower(node.id);
        node.validate();
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (nodes[i].id == nodes[i - 1].id) {
            if (nodes[i] == nodes[i - 1]) continue;
            fail(ErrorCode::duplicate_id, "duplicate node id '" + nodes[i].id + "'");
        }
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

DecisionDistribution normalize_distribution(double first, double second, double abstain) {
    if (first < 0 || second < 0 || abstain < 0)
        fail(ErrorCode::invalid_field, "negative weight");
    double sum = first + second + abstain;
    if (sum <= 0) fail(ErrorCode::all_zero_distribution, "all-zero weights");
    DecisionDistribution d{first / sum, second / sum, abstain / sum};
    return d;
}

void to_json(json& j, const Node& v) {
    j = json{{"id", v.id},
             {"kind", v.kind},
             {"tier", v.tier},
             {"label", v.label},
             {"description", v.description}};
}

void from_json(const json& j, Node& v) {
    v.id = to_lower(j.at("id").get<std::string>());
    v.kind = parse_enum<NodeKind>(j.at("kind"), "node kind");
    v.tier = parse_enum<NodeTier>(j.at("tier"), "node tier");
    v.label = j.at("label").get<std::string>();
    v.description = j.value("description", "");
    v.validate();
}

void to_json(json& j, const Claim& v) {
    j = json{{"id", v.id},
             {"statement", v.statement},
             {"criticality", v.criticality},
             {"verifiable", v.verifiable},
             {"subject_keys", v.subject_keys}};
}

void from_json(const json& j, Claim& v) {
    v.id = to_lower(j.at("id").get<std::string>());
    v.statement = j.at("statement").get<std::string>();
    v.criticality = parse_enum<Criticality>(j.at("criticality"), "criticality");
    v.verifiable = j.at("verifiable").get<bool>();
    v.subject_keys = j.value("subject_keys", std::vector<std::string>{});
    for (auto& key : v.subject_keys) key = to_lower(key);
    v.validate();
}

void to_json(json& j, const Turn& v) { j = json{{"role", v.role}, {"text", v.text}}; }

void from_json(const json& j, Turn& v) {
    v.role = j.at("role").get<std::string>();
    v.text = j.at("text").get<std::string>();
}

void to_json(json& j, const Context& v) {
    j = json{{"id", v.id},
             {"user_profile", v.user_profile},
             {"history", v.history},
             {"timestamp", format_instant(v.timestamp)},
             {"environment_claims", v.environment_claims},
             {"framing", v.framing}};
}

void from_json(const json& j, Context& v) {
    v.id = to_lower(j.at("id").get<std::string>());
    v.user_profile = j.value("user_profile", std::map<std::string, std::string>{});
    v.history = j.value("history", std::vector<Turn>{});
    if (j.contains("timestamp")) v.timestamp = parse_instant(j.at("timestamp").get<std::string>());
    v.environment_claims = j.value("environment_claims", std::vector<Claim>{});
    v.framing = j.value("framing", "");
    v.validate();
}

void to_json(json& j, const DecisionDistribution& v) {
    j = json{{"p_first", v.p_first}, {"p_second", v.p_second}, {"p_abstain", v.p_abstain}};
}

void from_json(const json& j, DecisionDistribution& v) {
    v.p_first = j.at("p_first").get<double>();
    v.p_second = j.at("p_second").get<double>();
    v.p_abstain = j.value("p_abstain", 0.0);
    v.validate();
}

void to_json(json& j, const MeasurementOutcome& v) {
    j = json{{"m_first", v.m_first},   {"m_second", v.m_second}, {"relation", v.relation},
             {"margin", v.margin},     {"confidence", v.confidence}, {"exact", v.exact}};
}

void from_json(const json& j, MeasurementOutcome& v) {
    v.m_first = j.at("m_first").get<double>();
    v.m_second = j.at("m_second").get<double>();
    v.relation = j.at("relation").get<Relation>();
    v.margin = j.at("margin").get<double>();
    v.confidence = j.at("confidence").get<double>();
    v.exact = j.at("exact").get<bool>();
}

void to_json(json& j, const PriorityEdge& v) {
    j = json{{"from", v.from}, {"to", v.to}, {"margin", v.margin}, {"confidence", v.confidence}};
}

void from_json(const json& j, PriorityEdge& v) {
    v.from = to_lower(j.at("from").get<std::string>());
    v.to = to_lower(j.at("to").get<std::string>());
    v.margin = j.at("margin").get<double>();
    v.confidence = j.at("confidence").get<double>();
}

void to_json(json& j, const BuildMeta& v) {
    j = json{{"measurement_policy", v.measurement_policy},
             {"samples_per_pair", v.samples_per_pair},
             {"seed", v.seed},
             {"tie_threshold", v.tie_threshold},
             {"indeterminate_pairs", v.indeterminate_pairs}};
}

void from_json(const json& j, BuildMeta& v) {
    v.measurement_policy = j.value("measurement_policy", "");
    v.samples_per_pair = j.value("samples_per_pair", 0);
    v.seed = j.value("seed", std::uint64_t{0});
    v.tie_threshold = j.value("tie_threshold", 0.0);
    v.indeterminate_pairs = j.value("indeterminate_pairs", std::vector<NodePair>{});
}

void to_json(json& j, const PriorityGraph& v) {
    j = json{{"context_id", v.context_id},
             {"nodes", v.nodes},
             {"edges", v.edges},
             {"build_meta", v.build_meta}};
}

void from_json(const json& j, PriorityGraph& v) {
    v.context_id = j.at("context_id").get<std::string>();
    v.nodes = j.at("nodes").get<std::vector<Node>>();
    v.edges = j.at("edges").get<std::vector<PriorityEdge>>();
    v.build_meta = j.value("build_meta", BuildMeta{});
    v.validate();
}

void to_json(json& j, const Verdict& v) {
    j = json{{"claim_id", v.claim_id},
             {"status", v.status},
             {"source_id", v.source_id ? json(*v.source_id) : json(nullptr)},
             {"evidence", v.evidence}};
}

void from_json(const json& j, Verdict& v) {
    v.claim_id = j.at("claim_id").get<std::string>();
    v.status = parse_enum<VerdictStatus>(j.at("status"), "verdict status");
    if (j.contains("source_id") && !j.at("source_id").is_null())
        v.source_id = j.at("source_id").get<std::string>();
    else
        v.source_id.reset();
    v.evidence = j.value("evidence", "");
    v.validate();
}

void to_json(json& j, const AttackResult& v) {
    j = json{{"target", v.target},
             {"base_context_id", v.base_context_id},
             {"adversarial_context", v.adversarial_context ? json(*v.adversarial_context) : json(nullptr)},
             {"flipped_edges", v.flipped_edges},
             {"trials_used", v.trials_used},
             {"success", v.success}};
}

void from_json(const json& j, AttackResult& v) {
    v.target = j.at("target").get<NodePair>();
    v.base_context_id = j.at("base_context_id").get<std::string>();
    if (j.contains("adversarial_context") && !j.at("adversarial_context").is_null())
        v.adversarial_context = j.at("adversarial_context").get<Context>();
    else
        v.adversarial_context.reset();
    v.flipped_edges = j.value("flipped_edges", std::vector<NodePair>{});
    v.trials_used = j.at("trials_used").get<int>();
    v.success = j.at("success").get<bool>();
    v.validate();
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io_error, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::parse_error, path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io_error, "cannot write " + path);
    out << text;
}

} // namespace priograph
