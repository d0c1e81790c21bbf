#include <string>

#include <CLI11.hpp>

#include "thermalab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"thermalab: thermal-state numerics on spin lattices"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int workers = 0;

    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("config", config_path, "path to the experiment config")->required();
    auto* out_opt = run->add_option("--out", out_dir, "output directory (overrides config)");
    auto* seed_opt = run->add_option("--seed", seed, "RNG seed (overrides config)");
    auto* workers_opt = run->add_option("--workers", workers, "worker pool size");

    auto* list = app.add_subcommand("list", "list registered experiments");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        thermalab::print_experiment_list();
        return 0;
    }

    thermalab::CliOverrides overrides;
    if (*out_opt) overrides.out_dir = out_dir;
    if (*seed_opt) overrides.seed = seed;
    if (*workers_opt) overrides.workers = workers;
    return thermalab::run_from_config(config_path, overrides);
}
