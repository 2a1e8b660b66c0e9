#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "priograph/corpus.hpp"
#include "priograph/redteam.hpp"
#include "priograph/verify.hpp"

namespace priograph::cli {

// Exit codes: 0 success/finding, 2 config error, 3 oracle error,
// 4 structural mismatch, 5 verification-infrastructure failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitOracle = 3;
inline constexpr int kExitMismatch = 4;
inline constexpr int kExitVerifyInfra = 5;

struct RunConfig {
    std::string oracle_path;
    std::string nodes_path;
    std::string contexts_path;
    std::string corpus_path;
    std::string templates_path;
    // Optional per-context node file override (exercises mismatch paths).
    std::map<std::string, std::string> nodes_by_context;
    std::vector<verify::FactSource> fact_sources;
    bool fact_sources_set = false;
    std::string default_context = "neutral";
    verify::VerificationPolicy verification_policy;
    redteam::AttackConfig attack;
    graph::MeasurementPolicy policy;
    std::string out_dir = "out";

    /// Loads a RunConfig JSON file; relative paths inside it are resolved
    /// against the file's directory, except out_dir which stays relative
    /// to the working directory.
    static RunConfig load(const std::string& path);
};

std::vector<Node> load_nodes(const std::string& path);
std::map<std::string, Context> load_contexts(const std::string& path);

NodePair parse_target(const std::string& spec); // "safety_id:value_id"

int cmd_build_graph(const RunConfig& config, const std::string& context_id, std::ostream& out);
int cmd_flipmap(const RunConfig& config, const std::string& context_a,
                const std::string& context_b, std::ostream& out);
int cmd_attack(const RunConfig& config, const NodePair& target, std::ostream& out);
int cmd_verify(const RunConfig& config, const std::string& context_id, const NodePair& target,
               std::ostream& out);
int cmd_run_suite(const RunConfig& config, std::ostream& out);

/// Exit code for an Error escaping a command.
int exit_code_for(const Error& e);

} // namespace priograph::cli
