#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "morseid/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    morseid::CliOverrides overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Run configuration JSON")->required();
    auto* seed = cmd->add_option("--seed", "Override the RNG seed");
    auto* method = cmd->add_option("--method", "Override the outer-approximation method");
    auto* out = cmd->add_option("--out", "Override the output directory");
    auto* grid = cmd->add_option("--grid", "Grid exponent k: 2^k cells per axis");
    auto* tau = cmd->add_option("--tau", "Override the map horizon");
    cmd->callback([&args, seed, method, out, grid, tau] {
        if (*seed) args.overrides.seed = seed->as<std::uint64_t>();
        if (*method) args.overrides.method = method->as<std::string>();
        if (*out) args.overrides.out_dir = out->as<std::string>();
        if (*grid) args.overrides.grid_k = grid->as<int>();
        if (*tau) args.overrides.tau = tau->as<double>();
    });
}

morseid::RunConfig load(const CommonArgs& args) {
    morseid::RunConfig config = morseid::load_config(args.config_path);
    morseid::apply_overrides(config, args.overrides);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Switching-system identification and combinatorial Morse analysis"};
    app.require_subcommand(1);

    CommonArgs sim_args, ident_args, morse_args;
    std::string ident_dataset;
    std::string compare_config_path, compare_out;

    auto* sim = app.add_subcommand("simulate", "Sample trajectories of a benchmark system");
    add_common(sim, sim_args);

    auto* ident = app.add_subcommand("identify", "Fit a switching model to a dataset");
    add_common(ident, ident_args);
    ident->add_option("dataset", ident_dataset, "Trajectory dataset CSV")->required();

    auto* morse = app.add_subcommand("morse", "Build the cell map, Morse graph and RoAs");
    add_common(morse, morse_args);

    auto* cmp = app.add_subcommand("compare", "Score stored runs against a reference");
    cmp->add_option("--config", compare_config_path, "Compare configuration JSON")->required();
    cmp->add_option("--out", compare_out, "Override the output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const auto art = morseid::cmd_simulate(load(sim_args));
            std::cout << "dataset: " << art.dataset_path << " (" << art.dataset.size()
                      << " samples)\n";
        } else if (ident->parsed()) {
            const auto art = morseid::cmd_identify(load(ident_args), ident_dataset);
            std::cout << "model: " << art.model_path << "\n";
            std::cout << "objective: "
                      << (art.result.objective_history.empty()
                              ? 0.0
                              : art.result.objective_history.back())
                      << " after " << art.result.objective_history.size() << " iterations\n";
        } else if (morse->parsed()) {
            const auto config = load(morse_args);
            const auto art = morseid::cmd_morse(config);
            std::cout << "cellmap: " << art.cellmap_path << "\n";
            std::cout << "morse graph: " << art.morse_path << " (" << art.mg.size()
                      << " nodes)\n";
            if (!art.svg_path.empty())
                std::cout << "figure: " << art.svg_path << "\n";
            else
                std::cout << "figure: skipped (state dimension is not 2)\n";
        } else if (cmp->parsed()) {
            auto config =
                morseid::compare_config_from_json(morseid::read_file(compare_config_path));
            if (!compare_out.empty()) config.out_dir = compare_out;
            const auto art = morseid::cmd_compare(config);
            std::cout << art.result.table;
            std::cout << "metrics: " << art.csv_path << "\n";
        }
    } catch (const morseid::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const morseid::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const morseid::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
