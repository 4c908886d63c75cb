#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rankone/cli.hpp"
#include "rankone/errors.hpp"
#include "rankone/parallel.hpp"

namespace cli = rankone::cli;

int main(int argc, char** argv) {
    CLI::App app{"Spectral analysis of rank-one cutting-and-stacking constructions"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    cli::Overrides ov;
    std::uint64_t seed = 0;
    std::size_t threads = 0, grid_cap = 0, depth = 0, samples = 0, stage = 0;

    app.add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    auto* o_seed = app.add_option("--seed", seed, "RNG seed (overrides config)");
    auto* o_threads = app.add_option("--threads", threads, "worker thread cap");
    auto* o_grid = app.add_option("--grid-cap", grid_cap, "log2 of the largest grid");

    std::string command;
    CLI::Option* o_depth = nullptr;
    CLI::Option* o_samples = nullptr;
    CLI::Option* o_stage = nullptr;
    for (const auto& name : cli::command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        sub->callback([&command, name] { command = name; });
        if (name == "ornstein") {
            o_depth = sub->add_option("--depth", depth, "ensemble depth");
            o_samples = sub->add_option("--samples", samples, "Monte Carlo samples");
            o_stage = sub->add_option("--stage", stage, "stage m");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kExitConfig;
    }

    if (*o_seed) ov.seed = seed;
    if (*o_threads) ov.threads = threads;
    if (*o_grid) ov.grid_cap = grid_cap;
    if (*o_depth) ov.depth = depth;
    if (*o_samples) ov.samples = samples;
    if (*o_stage) ov.stage = stage;

    try {
        std::ifstream in(config_path);
        std::stringstream text;
        text << in.rdbuf();
        auto config = cli::parse_config(text.str());
        cli::apply_overrides(config, ov);
        if (ov.threads) rankone::set_thread_count(*ov.threads);
        const int rc = cli::run_command(command, config, out_dir, std::cerr);
        if (rc == cli::kExitOk) std::cerr << command << ": ok, report in " << out_dir << '\n';
        return rc;
    } catch (const rankone::ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::kExitConfig;
    } catch (const rankone::CapError& e) {
        std::cerr << "cap exceeded: " << e.what() << " (required " << e.required() << ")\n";
        return cli::kExitConfig;
    } catch (const rankone::DegenerateError& e) {
        std::cerr << "invariant failed: degenerate: " << e.what() << '\n';
        return cli::kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitInvariant;
    }
}
