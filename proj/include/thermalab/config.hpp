#pragma once

#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "thermalab/hamiltonian.hpp"

namespace thermalab {

/// Parsed experiment configuration. The file format is JSON with keys
///   experiment: string (required)
///   seed:       unsigned integer (default 0)
///   output_dir: string (default "results")
///   model:      {name, n, D?, periodic?, couplings{...}} for experiments
///               that run one model
///   params:     experiment-specific block
/// Unknown top-level keys are rejected so typos surface as config errors.
class ExperimentConfig {
public:
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_json(const nlohmann::json& j);

    const std::string& experiment() const { return experiment_; }
    std::uint64_t seed() const { return seed_; }
    void set_seed(std::uint64_t s) { seed_ = s; }
    const std::string& output_dir() const { return output_dir_; }
    void set_output_dir(const std::string& d) { output_dir_ = d; }
    int workers() const { return workers_; }
    void set_workers(int w) { workers_ = w; }

    bool has_model() const { return model_.is_object(); }
    const nlohmann::json& model_json() const { return model_; }
    const nlohmann::json& params() const { return params_; }

    /// Canonical hash of the configuration content (stable under key
    /// reordering in the file; seed included).
    std::string content_hash() const;
    nlohmann::json echo() const;

    /// Builds the configured model; `n_override` substitutes the lattice
    /// extent (used by size sweeps).
    LocalHamiltonian build(const std::optional<int>& n_override = std::nullopt) const;

    // Typed access into params with defaults; missing required keys raise
    // ConfigError naming the key.
    double param_number(const std::string& key) const;
    double param_number(const std::string& key, double fallback) const;
    int param_int(const std::string& key) const;
    int param_int(const std::string& key, int fallback) const;
    std::vector<double> param_numbers(const std::string& key) const;
    std::vector<double> param_numbers(const std::string& key,
                                      const std::vector<double>& fallback) const;
    std::vector<int> param_ints(const std::string& key, const std::vector<int>& fallback) const;
    std::string param_string(const std::string& key, const std::string& fallback) const;
    bool param_bool(const std::string& key, bool fallback) const;

private:
    std::string experiment_;
    std::uint64_t seed_ = 0;
    std::string output_dir_ = "results";
    int workers_ = 1;
    nlohmann::json model_;
    nlohmann::json params_;
};

/// Inverse temperature for a model: explicit params.beta wins; otherwise
/// params.beta_star_factor scales beta_star(2De, J(H)).
double resolve_beta(const ExperimentConfig& config, const LocalHamiltonian& h);

} // namespace thermalab
