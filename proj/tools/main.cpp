#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "priograph/cli.hpp"

namespace pcli = priograph::cli;

namespace {

struct CommonFlags {
    std::string config_path;
    std::vector<std::string> contexts;
    std::string target;
    std::string out_dir;
    std::optional<std::int64_t> seed;
    std::optional<int> samples;
    std::optional<double> epsilon;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_context, bool needs_target) {
    cmd->add_option("--config", flags.config_path, "RunConfig JSON file")->required();
    auto* ctx = cmd->add_option("--context", flags.contexts, "context id (repeatable)");
    if (needs_context) ctx->required();
    auto* target = cmd->add_option("--target", flags.target, "<safety_id>:<value_id>");
    if (needs_target) target->required();
    cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", flags.seed, "measurement seed (overrides config)");
    cmd->add_option("--samples", flags.samples, "samples per pair, 0 = exact (overrides config)");
    cmd->add_option("--epsilon", flags.epsilon, "tie threshold (overrides config)");
}

pcli::RunConfig load_config(const CommonFlags& flags) {
    pcli::RunConfig config = pcli::RunConfig::load(flags.config_path);
    if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
    if (flags.seed) config.policy.seed = static_cast<std::uint64_t>(*flags.seed);
    if (flags.samples) {
        if (*flags.samples < 0) priograph::fail(priograph::ErrorCode::invalid_field,
                                                "--samples must be >= 0");
        config.policy.samples_per_pair = *flags.samples;
    }
    if (flags.epsilon) {
        if (*flags.epsilon < 0) priograph::fail(priograph::ErrorCode::invalid_field,
                                                "--epsilon must be >= 0");
        config.policy.tie_threshold = *flags.epsilon;
    }
    config.attack.policy = config.policy;
    config.attack.seed = config.policy.seed;
    config.attack.validate();
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"priograph: context-dependent priority graphs over instructions and values"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::optional<int> budget;

    auto* build = app.add_subcommand("build-graph", "build and analyze a priority graph");
    add_common(build, flags, true, false);

    auto* flipmap = app.add_subcommand("flipmap", "diff graphs across two contexts");
    add_common(flipmap, flags, true, false);

    auto* attack = app.add_subcommand("attack", "search for a priority-hacking context");
    add_common(attack, flags, false, true);
    attack->add_option("--budget", budget, "max contexts to try (overrides config)");

    auto* verify = app.add_subcommand("verify", "verify a context's premises, pick the graph");
    add_common(verify, flags, true, true);

    auto* suite = app.add_subcommand("run-suite", "run the scenario corpus");
    add_common(suite, flags, false, false);

    CLI11_PARSE(app, argc, argv);

    try {
        pcli::RunConfig config = load_config(flags);
        if (budget) {
            config.attack.budget = *budget;
            config.attack.validate();
        }

        if (build->parsed())
            return pcli::cmd_build_graph(config, flags.contexts.at(0), std::cout);
        if (flipmap->parsed()) {
            if (flags.contexts.size() != 2) {
                std::cerr << "flipmap needs --context twice (context A and context B)\n";
                return pcli::kExitConfig;
            }
            return pcli::cmd_flipmap(config, flags.contexts[0], flags.contexts[1], std::cout);
        }
        if (attack->parsed())
            return pcli::cmd_attack(config, pcli::parse_target(flags.target), std::cout);
        if (verify->parsed())
            return pcli::cmd_verify(config, flags.contexts.at(0), pcli::parse_target(flags.target),
                                    std::cout);
        if (suite->parsed()) return pcli::cmd_run_suite(config, std::cout);
    } catch (const priograph::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pcli::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pcli::kExitConfig;
    }
    return pcli::kExitConfig;
}
