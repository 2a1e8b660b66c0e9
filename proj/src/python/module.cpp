// Python bindings. Every function speaks JSON strings so the Python side
// can work with plain dicts; the wrapper package does the (de)serialization.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "priograph/cli.hpp"

namespace py = pybind11;
using namespace priograph;

namespace {

json parse(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorCode::parse_error, std::string(what) + ": " + e.what());
    }
}

std::string dump(const json& j) { return j.dump(); }

std::string py_decide(const std::string& oracle_json, const std::string& a1_json,
                      const std::string& a2_json, const std::string& context_json) {
    auto spec = parse(oracle_json, "oracle").get<oracle::OracleSpec>();
    auto a1 = parse(a1_json, "a1").get<Node>();
    auto a2 = parse(a2_json, "a2").get<Node>();
    auto ctx = parse(context_json, "context").get<Context>();
    return dump(json(oracle::decide(spec, a1, a2, ctx)));
}

std::string py_measure_pair(const std::string& oracle_json, const std::string& a1_json,
                            const std::string& a2_json, const std::string& context_json,
                            const std::string& policy_json) {
    auto spec = parse(oracle_json, "oracle").get<oracle::OracleSpec>();
    auto a1 = parse(a1_json, "a1").get<Node>();
    auto a2 = parse(a2_json, "a2").get<Node>();
    auto ctx = parse(context_json, "context").get<Context>();
    auto policy = parse(policy_json, "policy").get<graph::MeasurementPolicy>();
    return dump(json(graph::measure_pair(spec, a1, a2, ctx, policy)));
}

std::string py_build_graph(const std::string& nodes_json, const std::string& context_json,
                           const std::string& oracle_json, const std::string& policy_json) {
    auto nodes = parse(nodes_json, "nodes").get<std::vector<Node>>();
    auto ctx = parse(context_json, "context").get<Context>();
    auto spec = parse(oracle_json, "oracle").get<oracle::OracleSpec>();
    auto policy = parse(policy_json, "policy").get<graph::MeasurementPolicy>();
    return dump(json(graph::build_graph(nodes, ctx, spec, policy)));
}

std::string py_find_paradoxes(const std::string& graph_json) {
    auto g = parse(graph_json, "graph").get<PriorityGraph>();
    return dump(json(graph::find_paradoxes(g)));
}

std::string py_extract_hierarchy(const std::string& graph_json) {
    auto g = parse(graph_json, "graph").get<PriorityGraph>();
    return dump(json(graph::extract_hierarchy(g)));
}

std::string py_diff_graphs(const std::string& a_json, const std::string& b_json) {
    auto a = parse(a_json, "graph a").get<PriorityGraph>();
    auto b = parse(b_json, "graph b").get<PriorityGraph>();
    return dump(json(graph::diff_graphs(a, b)));
}

std::string py_export_graph(const std::string& graph_json, const std::string& format) {
    auto g = parse(graph_json, "graph").get<PriorityGraph>();
    if (format == "dot") return graph::export_graph(g, graph::ExportFormat::dot);
    if (format == "json") return graph::export_graph(g, graph::ExportFormat::json);
    fail(ErrorCode::invalid_field, "format must be 'dot' or 'json', got '" + format + "'");
}

std::string py_search_adversarial_context(const std::string& oracle_json,
                                          const std::string& base_context_json,
                                          const std::string& safety_json,
                                          const std::string& value_json,
                                          const std::string& templates_json,
                                          const std::string& config_json,
                                          const std::string& nodes_json) {
    auto spec = parse(oracle_json, "oracle").get<oracle::OracleSpec>();
    auto base = parse(base_context_json, "base context").get<Context>();
    auto safety = parse(safety_json, "safety node").get<Node>();
    auto value = parse(value_json, "value node").get<Node>();
    auto templates =
        parse(templates_json, "templates").get<std::vector<redteam::ContextTemplate>>();
    auto config = parse(config_json, "attack config").get<redteam::AttackConfig>();
    auto nodes = parse(nodes_json, "nodes").get<std::vector<Node>>();
    return dump(json(redteam::search_adversarial_context(spec, base, safety, value, templates,
                                                         config, nodes)));
}

std::string py_effective_graph(const std::string& context_json, const std::string& oracle_json,
                               const std::string& sources_json,
                               const std::string& default_graph_json,
                               const std::string& policy_json,
                               const std::string& build_policy_json) {
    auto ctx = parse(context_json, "context").get<Context>();
    auto spec = parse(oracle_json, "oracle").get<oracle::OracleSpec>();
    auto sources = parse(sources_json, "fact sources").get<std::vector<verify::FactSource>>();
    auto g_default = parse(default_graph_json, "default graph").get<PriorityGraph>();
    auto policy = parse(policy_json, "verification policy").get<verify::VerificationPolicy>();
    auto build_policy =
        parse(build_policy_json, "measurement policy").get<graph::MeasurementPolicy>();
    auto [g, report] =
        verify::effective_graph(ctx, spec, sources, g_default, policy, build_policy);
    return dump(json{{"graph", g}, {"report", report}});
}

std::string py_run_suite(const std::string& scenarios_json, const std::string& oracle_json,
                         const std::string& policy_json) {
    auto scenarios =
        parse(scenarios_json, "scenarios").get<std::vector<corpus::ScenarioRecord>>();
    auto spec = parse(oracle_json, "oracle").get<oracle::OracleSpec>();
    auto policy = parse(policy_json, "policy").get<graph::MeasurementPolicy>();
    return dump(json(corpus::run_suite(scenarios, spec, policy)));
}

std::string py_load_corpus(const std::string& path) {
    return dump(json(corpus::load_corpus(path)));
}

} // namespace

PYBIND11_MODULE(_priograph, m) {
    m.doc() = "context-dependent priority graphs over instructions and values";

    py::register_exception<Error>(m, "PriographError");

    m.def("decide_json", &py_decide, py::arg("oracle"), py::arg("a1"), py::arg("a2"),
          py::arg("context"));
    m.def("measure_pair_json", &py_measure_pair, py::arg("oracle"), py::arg("a1"), py::arg("a2"),
          py::arg("context"), py::arg("policy"));
    m.def("build_graph_json", &py_build_graph, py::arg("nodes"), py::arg("context"),
          py::arg("oracle"), py::arg("policy"));
    m.def("find_paradoxes_json", &py_find_paradoxes, py::arg("graph"));
    m.def("extract_hierarchy_json", &py_extract_hierarchy, py::arg("graph"));
    m.def("diff_graphs_json", &py_diff_graphs, py::arg("graph_a"), py::arg("graph_b"));
    m.def("export_graph_json", &py_export_graph, py::arg("graph"), py::arg("format"));
    m.def("search_adversarial_context_json", &py_search_adversarial_context, py::arg("oracle"),
          py::arg("base_context"), py::arg("safety"), py::arg("value"), py::arg("templates"),
          py::arg("config"), py::arg("nodes"));
    m.def("effective_graph_json", &py_effective_graph, py::arg("context"), py::arg("oracle"),
          py::arg("sources"), py::arg("default_graph"), py::arg("policy"),
          py::arg("build_policy"));
    m.def("run_suite_json", &py_run_suite, py::arg("scenarios"), py::arg("oracle"),
          py::arg("policy"));
    m.def("load_corpus_json", &py_load_corpus, py::arg("path"));
}
