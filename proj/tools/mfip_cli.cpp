// mfip: command-line runner for mean-field inventory pricing scenarios.
//
//   mfip solve <config> [--out DIR] [--seed N] [--n-steps N] [--quiet]
//
// Exit codes: 0 success, 2 config error, 3 non-convergence,
// 4 numerical-stability failure.

#include "mfip/config.hpp"
#include "mfip/scenario.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Mean-field equilibrium solver for competitive inventory pricing"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_steps;
    bool quiet = false;

    auto* solve = app.add_subcommand("solve", "Run the scenario described by a config file");
    solve->add_option("config", config_path, "Scenario config (key = value lines, or JSON)")->required();
    solve->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    solve->add_option("--seed", seed, "Random seed (overrides seed)");
    solve->add_option("--n-steps", n_steps, "Number of time steps (overrides grid.n_steps)");
    solve->add_flag("--quiet", quiet, "Suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : mfip::exit_config_error;
    }

    mfip::ScenarioConfig cfg;
    try {
        cfg = mfip::load_config(config_path);
        if (out_dir) cfg.output_dir = *out_dir;
        if (seed) cfg.seed = *seed;
        if (n_steps) cfg.model.grid.n_steps = *n_steps;
        mfip::check_config(cfg);
    } catch (const mfip::ConfigError& e) {
        std::cerr << "mfip: " << config_path;
        if (e.line() > 0) std::cerr << ":" << e.line();
        std::cerr << ": " << e.what() << '\n';
        return mfip::exit_config_error;
    }

    const int status = mfip::run_scenario(cfg, quiet ? nullptr : &std::cout);
    if (status != mfip::exit_ok && !quiet)
        std::cerr << "mfip: scenario finished with status " << status << " (see "
                  << (cfg.output_dir / "manifest.txt").string() << ")\n";
    return status;
}
