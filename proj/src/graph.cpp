#include "priograph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace priograph::graph {

std::string policy_name_string(PolicyName name) {
    switch (name) {
    case PolicyName::win_prob: return "win_prob";
    case PolicyName::win_prob_renorm: return "win_prob_renorm";
    case PolicyName::log_ratio: return "log_ratio";
    }
    return "?";
}

std::pair<double, double> wilson_interval(double successes, int n) {
    if (n <= 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054; // 95%
    double phat = successes / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (phat + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

constexpr double kLogRatioDelta = 1e-9;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

// Per-pair substream: the same (seed, pair) always yields the same draws
// regardless of evaluation order.
std::uint64_t pair_stream_seed(std::uint64_t seed, const std::string& a, const std::string& b) {
    auto [lo, hi] = std::minmax(a, b);
    std::uint64_t h = fnv1a(1469598103934665603ULL, &seed, sizeof(seed));
    h = fnv1a(h, lo.data(), lo.size());
    h = fnv1a(h, "|", 1);
    h = fnv1a(h, hi.data(), hi.size());
    return h;
}

struct Scores {
    double m_first;
    double m_second;
};

Scores apply_policy(PolicyName name, const DecisionDistribution& d) {
    switch (name) {
    case PolicyName::win_prob:
        return {d.p_first, d.p_second};
    case PolicyName::win_prob_renorm: {
        double mass = d.p_first + d.p_second;
        if (mass <= 0.0)
            fail(ErrorCode::renorm_undefined, "win_prob_renorm undefined when p_abstain = 1");
        return {d.p_first / mass, d.p_second / mass};
    }
    case PolicyName::log_ratio:
        return {std::log(d.p_first + kLogRatioDelta), std::log(d.p_second + kLogRatioDelta)};
    }
    fail(ErrorCode::invalid_field, "bad policy name");
}

} // namespace

MeasurementOutcome measure_pair(const oracle::OracleSpec& spec, const Node& a1, const Node& a2,
                                const Context& ctx, const MeasurementPolicy& policy) {
    if (a1.id == a2.id) fail(ErrorCode::invalid_field, "measure_pair needs distinct nodes");

    MeasurementOutcome outcome;
    DecisionDistribution dist;
    if (policy.samples_per_pair == 0) {
        auto [p1, p2] = oracle::exact_win_probability(spec, a1, a2, ctx);
        dist = {p1, p2, 1.0 - p1 - p2};
        outcome.exact = true;
        outcome.confidence = 1.0;
    } else {
        DecisionDistribution model = oracle::decide(spec, a1, a2, ctx);
        std::mt19937_64 rng(pair_stream_seed(policy.seed, a1.id, a2.id));
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        int n = policy.samples_per_pair;
        int wins_first = 0, wins_second = 0;
        // Draw in canonical pair order so that argument order does not
        // change the stream.
        bool canonical = a1.id < a2.id;
        double p_lo = canonical ? model.p_first : model.p_second;
        double p_hi = canonical ? model.p_second : model.p_first;
        for (int i = 0; i < n; ++i) {
            double u = uniform(rng);
            if (u < p_lo)
                (canonical ? wins_first : wins_second)++;
            else if (u < p_lo + p_hi)
                (canonical ? wins_second : wins_first)++;
        }
        dist = {double(wins_first) / n, double(wins_second) / n,
                double(n - wins_first - wins_second) / n};
        auto [lo, hi] = wilson_interval(wins_first, n);
        outcome.confidence = 1.0 - (hi - lo);
        outcome.exact = false;
    }

    Scores scores = apply_policy(policy.name, dist);
    outcome.m_first = scores.m_first;
    outcome.m_second = scores.m_second;
    outcome.margin = std::abs(scores.m_first - scores.m_second);
    if (outcome.margin <= policy.tie_threshold)
        outcome.relation = Relation::indeterminate;
    else
        outcome.relation = scores.m_first > scores.m_second ? Relation::first_over_second
                                                            : Relation::second_over_first;
    return outcome;
}

PriorityGraph build_graph(std::vector<Node> nodes, const Context& ctx,
                          const oracle::OracleSpec& spec, const MeasurementPolicy& policy) {
    nodes = validate_node_set(std::move(nodes));

    PriorityGraph graph;
    graph.context_id = ctx.id;
    graph.nodes = nodes;
    graph.build_meta.measurement_policy = policy_name_string(policy.name);
    graph.build_meta.samples_per_pair = policy.samples_per_pair;
    graph.build_meta.seed = policy.seed;
    graph.build_meta.tie_threshold = policy.tie_threshold;

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t k = i + 1; k < nodes.size(); ++k) {
            MeasurementOutcome outcome;
            try {
                outcome = measure_pair(spec, nodes[i], nodes[k], ctx, policy);
            } catch (const Error& e) {
                fail(e.code(), "pair (" + nodes[i].id + ", " + nodes[k].id + "): " + e.what());
            }
            switch (outcome.relation) {
            case Relation::first_over_second:
                graph.edges.push_back({nodes[i].id, nodes[k].id, outcome.margin, outcome.confidence});
                break;
            case Relation::second_over_first:
                graph.edges.push_back({nodes[k].id, nodes[i].id, outcome.margin, outcome.confidence});
                break;
            case Relation::indeterminate:
                graph.build_meta.indeterminate_pairs.push_back({nodes[i].id, nodes[k].id});
                break;
            }
        }
    }
    graph.validate();
    return graph;
}

namespace {

struct Adjacency {
    std::vector<std::string> ids; // sorted
    std::vector<std::vector<int>> out;
    std::map<std::string, int> index;
};

Adjacency adjacency(const PriorityGraph& graph) {
    Adjacency adj;
    for (const auto& node : graph.nodes) adj.ids.push_back(node.id);
    std::sort(adj.ids.begin(), adj.ids.end());
    for (std::size_t i = 0; i < adj.ids.size(); ++i) adj.index[adj.ids[i]] = int(i);
    adj.out.resize(adj.ids.size());
    for (const auto& edge : graph.edges) adj.out[adj.index.at(edge.from)].push_back(adj.index.at(edge.to));
    for (auto& row : adj.out) std::sort(row.begin(), row.end());
    return adj;
}

// Iterative Tarjan.
std::vector<std::vector<int>> tarjan_sccs(const std::vector<std::vector<int>>& out) {
    int n = int(out.size());
    std::vector<int> number(n, -1), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    std::vector<std::vector<int>> sccs;
    int counter = 0;

    struct Frame {
        int vertex;
        std::size_t next;
    };
    for (int root = 0; root < n; ++root) {
        if (number[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        number[root] = lowlink[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& frame = frames.back();
            int v = frame.vertex;
            if (frame.next < out[v].size()) {
                int w = out[v][frame.next++];
                if (number[w] == -1) {
                    number[w] = lowlink[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], number[w]);
                }
            } else {
                frames.pop_back();
                if (!frames.empty())
                    lowlink[frames.back().vertex] = std::min(lowlink[frames.back().vertex], lowlink[v]);
                if (lowlink[v] == number[v]) {
                    std::vector<int> scc;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        scc.push_back(w);
                    } while (w != v);
                    sccs.push_back(std::move(scc));
                }
            }
        }
    }
    return sccs;
}

// Witness cycle through `start`, restricted to `members`, neighbors in
// sorted id order.
std::vector<int> witness_cycle(const std::vector<std::vector<int>>& out, int start,
                               const std::set<int>& members) {
    std::vector<int> path{start};
    std::set<int> visited{start};
    std::function<bool()> extend = [&]() {
        int v = path.back();
        for (int w : out[v]) {
            if (!members.contains(w)) continue;
            if (w == start && path.size() >= 2) return true;
            if (visited.contains(w)) continue;
            path.push_back(w);
            visited.insert(w);
            if (extend()) return true;
            path.pop_back();
            visited.erase(w);
        }
        return false;
    };
    if (!extend()) return {}; // unreachable for an SCC of size >= 2
    return path;
}

} // namespace

std::vector<std::vector<std::string>> find_paradoxes(const PriorityGraph& graph) {
    Adjacency adj = adjacency(graph);
    auto sccs = tarjan_sccs(adj.out);
    std::vector<std::vector<std::string>> cycles;
    for (auto& scc : sccs) {
        if (scc.size() < 2) continue;
        int start = *std::min_element(scc.begin(), scc.end());
        std::set<int> members(scc.begin(), scc.end());
        std::vector<int> cycle = witness_cycle(adj.out, start, members);
        std::vector<std::string> ids;
        for (int v : cycle) ids.push_back(adj.ids[v]);
        cycles.push_back(std::move(ids));
    }
    std::sort(cycles.begin(), cycles.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return cycles;
}

std::vector<std::string> extract_hierarchy(const PriorityGraph& graph) {
    std::size_t n = graph.nodes.size();
    std::size_t expected = n * (n - 1) / 2;
    if (graph.edges.size() < expected) {
        std::vector<std::string> missing;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = i + 1; k < n; ++k)
                if (graph.edge_direction(graph.nodes[i].id, graph.nodes[k].id) == 0)
                    missing.push_back("(" + graph.nodes[i].id + ", " + graph.nodes[k].id + ")");
        std::string detail;
        for (const auto& m : missing) detail += (detail.empty() ? "" : ", ") + m;
        fail(ErrorCode::incomplete, "tournament incomplete; undecided pairs: " + detail);
    }

    auto cycles = find_paradoxes(graph);
    if (!cycles.empty()) {
        std::string detail;
        for (const auto& id : cycles.front()) detail += (detail.empty() ? "" : " -> ") + id;
        fail(ErrorCode::cyclic, "tournament is cyclic; witness: " + detail + " -> " +
                                    cycles.front().front());
    }

    // Acyclic complete tournament: out-degrees are distinct, sort by them.
    std::map<std::string, int> outdeg;
    for (const auto& node : graph.nodes) outdeg[node.id] = 0;
    for (const auto& edge : graph.edges) outdeg[edge.from]++;
    std::vector<std::string> order;
    for (const auto& node : graph.nodes) order.push_back(node.id);
    std::sort(order.begin(), order.end(),
              [&](const std::string& a, const std::string& b) { return outdeg[a] > outdeg[b]; });
    return order;
}

GraphDiff diff_graphs(const PriorityGraph& a, const PriorityGraph& b) {
    auto ids_of = [](const PriorityGraph& g) {
        std::vector<std::string> ids;
        for (const auto& node : g.nodes) ids.push_back(node.id);
        std::sort(ids.begin(), ids.end());
        return ids;
    };
    std::vector<std::string> ids = ids_of(a);
    if (ids != ids_of(b)) fail(ErrorCode::node_set_mismatch, "graphs cover different node sets");

    GraphDiff diff;
    diff.context_a = a.context_id;
    diff.context_b = b.context_id;
    int comparable = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t k = i + 1; k < ids.size(); ++k) {
            int dir_a = a.edge_direction(ids[i], ids[k]);
            int dir_b = b.edge_direction(ids[i], ids[k]);
            if (dir_a != 0 && dir_b != 0) {
                ++comparable;
                if (dir_a != dir_b) {
                    // Report with direction as in graph a.
                    if (dir_a > 0)
                        diff.flipped.push_back({ids[i], ids[k]});
                    else
                        diff.flipped.push_back({ids[k], ids[i]});
                }
            } else if (dir_a == 0 && dir_b != 0) {
                diff.gained.push_back({ids[i], ids[k]});
            } else if (dir_a != 0 && dir_b == 0) {
                diff.lost.push_back({ids[i], ids[k]});
            }
        }
    }
    diff.stability_index =
        comparable == 0 ? 1.0 : 1.0 - double(diff.flipped.size()) / double(comparable);
    return diff;
}

std::string export_graph(const PriorityGraph& graph, ExportFormat format) {
    if (format == ExportFormat::json) {
        json j = graph;
        j["format_version"] = 1;
        return j.dump(2) + "\n";
    }

    std::vector<std::string> ids;
    for (const auto& node : graph.nodes) ids.push_back(node.id);
    std::sort(ids.begin(), ids.end());
    std::vector<PriorityEdge> edges = graph.edges;
    std::sort(edges.begin(), edges.end(), [](const PriorityEdge& a, const PriorityEdge& b) {
        return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });

    std::ostringstream out;
    out << "digraph priority {\n";
    for (const auto& id : ids) out << "  \"" << id << "\";\n";
    for (const auto& edge : edges) {
        char label[32];
        std::snprintf(label, sizeof(label), "%.3f", edge.margin);
        out << "  \"" << edge.from << "\" -> \"" << edge.to << "\" [label=\"" << label << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

PriorityGraph import_graph_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::parse_error, e.what());
    }
    return j.get<PriorityGraph>();
}

void to_json(json& j, const MeasurementPolicy& v) {
    j = json{{"name", v.name},
             {"tie_threshold", v.tie_threshold},
             {"samples_per_pair", v.samples_per_pair},
             {"seed", v.seed}};
}

void from_json(const json& j, MeasurementPolicy& v) {
    v.name = j.value("name", PolicyName::win_prob);
    v.tie_threshold = j.value("tie_threshold", 0.05);
    v.samples_per_pair = j.value("samples_per_pair", 0);
    v.seed = j.value("seed", std::uint64_t{0});
    if (v.tie_threshold < 0) fail(ErrorCode::invalid_field, "tie_threshold must be >= 0");
    if (v.samples_per_pair < 0) fail(ErrorCode::invalid_field, "samples_per_pair must be >= 0");
}

void to_json(json& j, const GraphDiff& v) {
    j = json{{"context_a", v.context_a}, {"context_b", v.context_b},
             {"flipped", v.flipped},     {"gained", v.gained},
             {"lost", v.lost},           {"stability_index", v.stability_index}};
}

void from_json(const json& j, GraphDiff& v) {
    v.context_a = j.at("context_a").get<std::string>();
    v.context_b = j.at("context_b").get<std::string>();
    v.flipped = j.value("flipped", std::vector<NodePair>{});
    v.gained = j.value("gained", std::vector<NodePair>{});
    v.lost = j.value("lost", std::vector<NodePair>{});
    v.stability_index = j.at("stability_index").get<double>();
}

} // namespace priograph::graph
