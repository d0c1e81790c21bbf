#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "thermalab/config.hpp"

namespace thermalab {

struct ExperimentResult {
    std::vector<std::string> csv_files;
    int rows = 0;
    std::vector<std::string> warnings;
    nlohmann::json summary = nlohmann::json::object();
};

struct ExperimentInfo {
    std::string name;
    std::string description;
    std::string verifies;
};

/// Registered experiments, in listing order.
const std::vector<ExperimentInfo>& experiment_registry();

/// Runs the experiment named in the config, writing CSV output under out_dir.
/// Throws ConfigError for unknown names.
ExperimentResult run_registered(const ExperimentConfig& config, const std::string& out_dir);

/// Order-preserving parallel map over [0, count) with a bounded worker pool.
void parallel_indexed(int count, int workers, const std::function<void(int)>& fn);

} // namespace thermalab
