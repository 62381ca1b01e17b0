#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "topomorph/pipeline.hpp"

namespace {

int log_level() {
    const char* env = std::getenv("TOPOMORPH_LOG");
    if (!env) return 1;
    const std::string v(env);
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proxy-based topological pre-processing for decentralized learning"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;

    const char* verbs[] = {"morph", "build", "train", "experiment", "accounting"};
    const char* help[] = {
        "Run the gossip phase only and dump the similarity matrix",
        "Cluster a stored matrix and emit both final-graph plans",
        "Run decentralized training on stored plans",
        "Full pipeline: morph, build, then train both arms and compare",
        "Counting-only large-scale run tracking message and byte totals",
    };
    for (int i = 0; i < 5; ++i) {
        auto* sub = app.add_subcommand(verbs[i], help[i]);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed_override, "Override the config's master seed");
        sub->add_option("--out", out_override, "Output directory (overrides config)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string verb = app.get_subcommands().front()->get_name();

    try {
        topomorph::ExperimentConfig cfg = topomorph::ExperimentConfig::parse_file(config_path);
        cfg.mode = topomorph::run_mode_from_string(verb);
        if (seed_override >= 0) {
            cfg.seed = static_cast<std::uint64_t>(seed_override);
            cfg.train.seed = cfg.seed;
        }
        if (!out_override.empty()) cfg.out = out_override;

        if (log_level() >= 1)
            std::cerr << "topomorph: mode=" << verb << " n=" << cfg.n << " seed=" << cfg.seed
                      << " out=" << cfg.out << "\n";
        const int status = topomorph::run_pipeline(cfg);
        if (log_level() >= 1) std::cerr << "topomorph: done\n";
        return status;
    } catch (const std::exception& e) {
        std::cerr << "topomorph: error: " << e.what() << "\n";
        return 1;
    }
}
