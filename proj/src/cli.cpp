#include "priograph/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>

namespace priograph::cli {

namespace fs = std::filesystem;

namespace {

std::string resolve(const fs::path& base, const std::string& path) {
    if (path.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return p.string();
    return (base / p).lexically_normal().string();
}

std::string sanitize(std::string name) {
    std::replace(name.begin(), name.end(), '/', '_');
    return name;
}

fs::path ensure_out_dir(const RunConfig& config) {
    fs::path out(config.out_dir);
    fs::create_directories(out);
    return out;
}

const Context& context_or_fail(const std::map<std::string, Context>& contexts,
                               const std::string& id) {
    auto it = contexts.find(to_lower(id));
    if (it == contexts.end())
        fail(ErrorCode::invalid_field, "unknown context id '" + id + "'");
    return it->second;
}

std::vector<Node> nodes_for_context(const RunConfig& config, const std::string& context_id) {
    auto it = config.nodes_by_context.find(context_id);
    const std::string& path = it != config.nodes_by_context.end() ? it->second : config.nodes_path;
    if (path.empty()) fail(ErrorCode::invalid_field, "config has no nodes path");
    return load_nodes(path);
}

const Node& find_node(const std::vector<Node>& nodes, const std::string& id) {
    for (const auto& node : nodes)
        if (node.id == id) return node;
    fail(ErrorCode::unknown_node, "node '" + id + "' not in node set");
}

} // namespace

RunConfig RunConfig::load(const std::string& path) {
    json j = load_json_file(path);
    fs::path base = fs::path(path).parent_path();

    RunConfig config;
    config.oracle_path = resolve(base, j.value("oracle", ""));
    config.nodes_path = resolve(base, j.value("nodes", ""));
    config.contexts_path = resolve(base, j.value("contexts", ""));
    config.corpus_path = resolve(base, j.value("corpus", ""));
    config.templates_path = resolve(base, j.value("templates", ""));
    for (const auto& [ctx_id, nodes_path] :
         j.value("nodes_by_context", std::map<std::string, std::string>{}))
        config.nodes_by_context[to_lower(ctx_id)] = resolve(base, nodes_path);
    if (j.contains("fact_sources")) {
        config.fact_sources_set = true;
        config.fact_sources = j.at("fact_sources").get<std::vector<verify::FactSource>>();
        for (auto& source : config.fact_sources) source.kb_path = resolve(base, source.kb_path);
    }
    config.default_context = to_lower(j.value("default_context", "neutral"));
    config.verification_policy = j.value("verification_policy", verify::VerificationPolicy{});
    config.attack = j.value("attack", redteam::AttackConfig{});
    config.policy = j.value("policy", graph::MeasurementPolicy{});
    config.attack.policy = config.policy;
    config.attack.seed = config.policy.seed;
    config.out_dir = j.value("out_dir", "out");
    return config;
}

std::vector<Node> load_nodes(const std::string& path) {
    return validate_node_set(load_json_file(path).at("nodes").get<std::vector<Node>>());
}

std::map<std::string, Context> load_contexts(const std::string& path) {
    std::map<std::string, Context> contexts;
    for (auto& ctx : load_json_file(path).at("contexts").get<std::vector<Context>>()) {
        if (contexts.contains(ctx.id))
            fail(ErrorCode::duplicate_id, "context file repeats id '" + ctx.id + "'");
        contexts[ctx.id] = std::move(ctx);
    }
    return contexts;
}

NodePair parse_target(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == spec.size())
        fail(ErrorCode::invalid_field, "target must be <safety_id>:<value_id>, got '" + spec + "'");
    return {to_lower(spec.substr(0, colon)), to_lower(spec.substr(colon + 1))};
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::unknown_node:
    case ErrorCode::unknown_pair:
    case ErrorCode::remote_unreachable:
    case ErrorCode::malformed_response:
    case ErrorCode::renorm_undefined:
    case ErrorCode::all_zero_distribution:
    case ErrorCode::unsupported:
        return kExitOracle;
    case ErrorCode::node_set_mismatch:
        return kExitMismatch;
    case ErrorCode::verify_infra:
        return kExitVerifyInfra;
    default:
        return kExitConfig;
    }
}

int cmd_build_graph(const RunConfig& config, const std::string& context_id, std::ostream& out) {
    auto spec = oracle::OracleSpec::load(config.oracle_path);
    auto contexts = load_contexts(config.contexts_path);
    const Context& ctx = context_or_fail(contexts, context_id);
    auto nodes = nodes_for_context(config, ctx.id);

    PriorityGraph built = graph::build_graph(nodes, ctx, spec, config.policy);

    fs::path out_dir = ensure_out_dir(config);
    std::string stem = "graph_" + sanitize(ctx.id);
    write_text_file((out_dir / (stem + ".json")).string(),
                    graph::export_graph(built, graph::ExportFormat::json));
    write_text_file((out_dir / (stem + ".dot")).string(),
                    graph::export_graph(built, graph::ExportFormat::dot));

    try {
        auto hierarchy = graph::extract_hierarchy(built);
        std::string line;
        for (const auto& id : hierarchy) line += (line.empty() ? "" : " > ") + id;
        out << line << "\n";
    } catch (const Error&) {
        auto cycles = graph::find_paradoxes(built);
        if (cycles.empty()) {
            out << "no total hierarchy: " << built.build_meta.indeterminate_pairs.size()
                << " indeterminate pair(s)\n";
        } else {
            for (const auto& cycle : cycles) {
                std::string line = "cycle:";
                for (const auto& id : cycle) line += " " + id + " ->";
                out << line << " " << cycle.front() << "\n";
            }
        }
    }
    return kExitOk;
}

int cmd_flipmap(const RunConfig& config, const std::string& context_a,
                const std::string& context_b, std::ostream& out) {
    auto spec = oracle::OracleSpec::load(config.oracle_path);
    auto contexts = load_contexts(config.contexts_path);
    const Context& ctx_a = context_or_fail(contexts, context_a);
    const Context& ctx_b = context_or_fail(contexts, context_b);

    PriorityGraph g_a = graph::build_graph(nodes_for_context(config, ctx_a.id), ctx_a, spec,
                                           config.policy);
    PriorityGraph g_b = graph::build_graph(nodes_for_context(config, ctx_b.id), ctx_b, spec,
                                           config.policy);
    graph::GraphDiff diff = graph::diff_graphs(g_a, g_b);

    fs::path out_dir = ensure_out_dir(config);
    json j = diff;
    write_text_file(
        (out_dir / ("flipmap_" + sanitize(ctx_a.id) + "_vs_" + sanitize(ctx_b.id) + ".json"))
            .string(),
        j.dump(2) + "\n");

    for (const auto& [from, to] : diff.flipped) out << "flipped: " << from << " -> " << to << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "stability %.3f", diff.stability_index);
    out << buf << "\n";
    return kExitOk;
}

int cmd_attack(const RunConfig& config, const NodePair& target, std::ostream& out) {
    auto spec = oracle::OracleSpec::load(config.oracle_path);
    auto contexts = load_contexts(config.contexts_path);
    const Context& base = context_or_fail(contexts, config.default_context);
    auto nodes = nodes_for_context(config, base.id);
    const Node& safety = find_node(nodes, target.first);
    const Node& value = find_node(nodes, target.second);
    auto templates = redteam::load_template_library(config.templates_path);

    AttackResult result = redteam::search_adversarial_context(spec, base, safety, value,
                                                              templates, config.attack, nodes);

    fs::path out_dir = ensure_out_dir(config);
    json j = result;
    write_text_file(
        (out_dir / ("attack_" + sanitize(target.first) + "_vs_" + sanitize(target.second) + ".json"))
            .string(),
        j.dump(2) + "\n");

    if (result.success)
        out << "SUCCESS after " << result.trials_used << " trials\n";
    else
        out << "FAILED (budget " << config.attack.budget << ")\n";
    return kExitOk;
}

int cmd_verify(const RunConfig& config, const std::string& context_id, const NodePair& target,
               std::ostream& out) {
    auto spec = oracle::OracleSpec::load(config.oracle_path);
    auto contexts = load_contexts(config.contexts_path);
    const Context& ctx = context_or_fail(contexts, context_id);
    const Context& base = context_or_fail(contexts, config.default_context);
    auto nodes = nodes_for_context(config, base.id);

    if (!config.fact_sources_set)
        fail(ErrorCode::verify_infra, "config has no fact_sources; verification cannot run");

    PriorityGraph g_default = graph::build_graph(nodes, base, spec, config.policy);
    auto [effective, report] = verify::effective_graph(ctx, spec, config.fact_sources, g_default,
                                                       config.verification_policy, config.policy);

    fs::path out_dir = ensure_out_dir(config);
    json report_json = report;
    write_text_file((out_dir / ("verify_" + sanitize(ctx.id) + ".json")).string(),
                    report_json.dump(2) + "\n");
    write_text_file((out_dir / ("effective_graph_" + sanitize(ctx.id) + ".json")).string(),
                    graph::export_graph(effective, graph::ExportFormat::json));

    std::string outcome;
    switch (report.outcome) {
    case verify::VerificationOutcome::context_trusted: outcome = "CONTEXT_TRUSTED"; break;
    case verify::VerificationOutcome::reverted_to_default: outcome = "REVERTED_TO_DEFAULT"; break;
    case verify::VerificationOutcome::blocked: outcome = "BLOCKED"; break;
    }
    std::string graph_tag =
        report.outcome == verify::VerificationOutcome::context_trusted ? "context" : "default";
    int dir = effective.edge_direction(target.first, target.second);
    std::string pair_line;
    if (dir > 0)
        pair_line = target.first + " > " + target.second;
    else if (dir < 0)
        pair_line = target.second + " > " + target.first;
    else
        pair_line = target.first + " ? " + target.second;
    out << outcome << "; " << pair_line << " (" << graph_tag << ")\n";
    return kExitOk;
}

int cmd_run_suite(const RunConfig& config, std::ostream& out) {
    auto spec = oracle::OracleSpec::load(config.oracle_path);
    auto scenarios = corpus::load_corpus(config.corpus_path);
    corpus::SuiteReport report = corpus::run_suite(scenarios, spec, config.policy);

    fs::path out_dir = ensure_out_dir(config);
    json j = report;
    write_text_file((out_dir / "suite_report.json").string(), j.dump(2) + "\n");
    std::string table = corpus::report_table(scenarios, report);
    write_text_file((out_dir / "suite_report.txt").string(), table);
    out << table;
    return kExitOk;
}

} // namespace priograph::cli
