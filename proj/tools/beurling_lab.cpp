#include "beurling/config.hpp"
#include "beurling/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Generalized prime systems: construction, tables and oscillation checks"};
    std::string subcommand, config_path, out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string names;
    for (const auto& s : beurling::subcommands()) names += (names.empty() ? "" : ", ") + s;
    app.add_option("subcommand", subcommand, "One of: " + names)->required();
    app.add_option("--config", config_path, "Config file (key = value, [section] headers)");
    auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
    auto* seed_opt = app.add_option("--seed", seed, "Seed (overrides the config)");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : beurling::kUsageError;
    }

    beurling::ExperimentConfig cfg;
    try {
        cfg = config_path.empty() ? beurling::ExperimentConfig{} : beurling::load_config(config_path);
    } catch (const beurling::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return beurling::kUsageError;
    }
    beurling::RunOptions opts;
    if (*out_opt) opts.out_dir = out_dir;
    if (*seed_opt) opts.seed = seed;
    opts.threads = threads;
    return beurling::run(subcommand, cfg, opts, std::cerr);
}
