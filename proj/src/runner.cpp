#include "thermalab/runner.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "thermalab/config.hpp"
#include "thermalab/errors.hpp"
#include "thermalab/experiments.hpp"
#include "thermalab/numio.hpp"

namespace thermalab {

namespace fs = std::filesystem;

void print_experiment_list() {
    std::cout << "registered experiments (" << experiment_registry().size() << "):\n";
    for (const auto& info : experiment_registry()) {
        std::cout << "  " << info.name << " -> " << info.verifies << "\n      "
                  << info.description << "\n";
    }
}

int run_from_config(const std::string& config_path, const CliOverrides& overrides) {
    nlohmann::json manifest;
    std::string out_dir = "results";
    try {
        ExperimentConfig config = ExperimentConfig::load(config_path);
        if (overrides.seed) config.set_seed(*overrides.seed);
        if (overrides.out_dir) config.set_output_dir(*overrides.out_dir);
        if (overrides.workers) config.set_workers(*overrides.workers);
        out_dir = config.output_dir();

        manifest["experiment"] = config.experiment();
        manifest["config"] = config.echo();
        manifest["config_hash"] = config.content_hash();
        manifest["seed"] = config.seed();
        manifest["rng"] = "mt19937_64";
        manifest["version"] = kVersion;
        manifest["started_utc"] = iso8601_utc_now();

        ExperimentResult result = run_registered(config, out_dir);

        manifest["finished_utc"] = iso8601_utc_now();
        manifest["rows"] = result.rows;
        manifest["csv_files"] = result.csv_files;
        manifest["warnings"] = result.warnings;
        manifest["summary"] = result.summary;

        fs::create_directories(out_dir);
        const std::string manifest_path =
            (fs::path(out_dir) / (config.experiment() + "_manifest.json")).string();
        std::ofstream out(manifest_path);
        out << manifest.dump(2) << "\n";

        std::cout << config.experiment() << ": " << result.rows << " rows -> "
                  << (result.csv_files.empty() ? "(no csv)" : result.csv_files.front());
        if (!result.warnings.empty())
            std::cout << "  [" << result.warnings.size() << " warning(s)]";
        std::cout << "\nmanifest: " << manifest_path << "\n";
        for (const auto& w : result.warnings) std::cout << "warning: " << w << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const RegimeError& e) {
        std::cerr << "regime error: " << e.what() << "\n";
        return kExitRegime;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace thermalab
