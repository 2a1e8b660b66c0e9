#pragma once

#include <string>
#include <vector>

#include "priograph/core.hpp"
#include "priograph/oracle.hpp"

namespace priograph::graph {

enum class PolicyName { win_prob, win_prob_renorm, log_ratio };

/// How a DecisionDistribution is turned into per-option scores, plus
/// sampling configuration. samples_per_pair = 0 means exact mode.
struct MeasurementPolicy {
    PolicyName name = PolicyName::win_prob;
    double tie_threshold = 0.05;
    int samples_per_pair = 0;
    std::uint64_t seed = 0;

    bool operator==(const MeasurementPolicy&) const = default;
};

std::string policy_name_string(PolicyName name);

/// 95% Wilson score interval for `successes` out of `n` draws.
std::pair<double, double> wilson_interval(double successes, int n);

MeasurementOutcome measure_pair(const oracle::OracleSpec& spec, const Node& a1, const Node& a2,
                                const Context& ctx, const MeasurementPolicy& policy);

PriorityGraph build_graph(std::vector<Node> nodes, const Context& ctx,
                          const oracle::OracleSpec& spec, const MeasurementPolicy& policy);

/// One witness cycle per strongly connected component of size >= 2,
/// ordered by lowest member id.
std::vector<std::vector<std::string>> find_paradoxes(const PriorityGraph& graph);

/// Unique topological order of a complete acyclic tournament.
std::vector<std::string> extract_hierarchy(const PriorityGraph& graph);

struct GraphDiff {
    std::string context_a;
    std::string context_b;
    std::vector<NodePair> flipped; // direction in graph a
    std::vector<NodePair> gained;  // indeterminate in a, edged in b
    std::vector<NodePair> lost;    // edged in a, indeterminate in b
    double stability_index = 1.0;

    bool operator==(const GraphDiff&) const = default;
};

GraphDiff diff_graphs(const PriorityGraph& a, const PriorityGraph& b);

enum class ExportFormat { dot, json };

std::string export_graph(const PriorityGraph& graph, ExportFormat format);
PriorityGraph import_graph_json(const std::string& text);

NLOHMANN_JSON_SERIALIZE_ENUM(PolicyName, {
    {PolicyName::win_prob, "win_prob"},
    {PolicyName::win_prob_renorm, "win_prob_renorm"},
    {PolicyName::log_ratio, "log_ratio"},
})

void to_json(json& j, const MeasurementPolicy& v);
void from_json(const json& j, MeasurementPolicy& v);
void to_json(json& j, const GraphDiff& v);
void from_json(const json& j, GraphDiff& v);

} // namespace priograph::graph
