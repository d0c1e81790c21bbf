#include "thermalab/config.hpp"

#include <fstream>

#include "thermalab/correlations.hpp"
#include "thermalab/errors.hpp"
#include "thermalab/numio.hpp"

namespace thermalab {

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    static const std::vector<std::string> known = {"experiment", "seed",  "output_dir",
                                                   "workers",    "model", "params"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown config key '" + key + "'");
    }
    ExperimentConfig c;
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw ConfigError("config needs a string 'experiment' key");
    c.experiment_ = j["experiment"].get<std::string>();
    c.seed_ = j.value("seed", std::uint64_t(0));
    c.output_dir_ = j.value("output_dir", std::string("results"));
    c.workers_ = j.value("workers", 1);
    c.model_ = j.value("model", nlohmann::json());
    c.params_ = j.value("params", nlohmann::json::object());
    if (!c.params_.is_object()) throw ConfigError("'params' must be an object");
    return c;
}

nlohmann::json ExperimentConfig::echo() const {
    nlohmann::json j;
    j["experiment"] = experiment_;
    j["seed"] = seed_;
    j["output_dir"] = output_dir_;
    j["workers"] = workers_;
    if (model_.is_object()) j["model"] = model_;
    j["params"] = params_;
    return j;
}

std::string ExperimentConfig::content_hash() const {
    nlohmann::json j;
    j["experiment"] = experiment_;
    j["seed"] = seed_;
    if (model_.is_object()) j["model"] = model_;
    j["params"] = params_;
    // nlohmann::json orders object keys, so dump() is canonical.
    return hex64(fnv1a64(j.dump()));
}

LocalHamiltonian ExperimentConfig::build(const std::optional<int>& n_override) const {
    if (!model_.is_object()) throw ConfigError("experiment '" + experiment_ +
                                               "' needs a 'model' block");
    if (!model_.contains("name")) throw ConfigError("model block needs 'name'");
    const std::string name = model_["name"].get<std::string>();
    const int n = n_override.value_or(model_.value("n", 0));
    if (n < 1) throw ConfigError("model block needs a positive lattice extent 'n'");
    const int dim = model_.value("D", 1);
    const bool periodic = model_.value("periodic", false);

    std::map<std::string, double> couplings;
    if (model_.contains("couplings")) {
        for (const auto& [key, value] : model_["couplings"].items()) {
            if (!value.is_number())
                throw ConfigError("coupling '" + key + "' must be a number");
            couplings[key] = value.get<double>();
        }
    }
    auto graph = std::make_shared<InteractionGraph>(build_cubic(n, dim, periodic));
    try {
        return build_model(name, graph, couplings);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

namespace {
const nlohmann::json& need(const nlohmann::json& params, const std::string& key) {
    if (!params.contains(key)) throw ConfigError("missing required param '" + key + "'");
    return params.at(key);
}
} // namespace

double ExperimentConfig::param_number(const std::string& key) const {
    const auto& v = need(params_, key);
    if (!v.is_number()) throw ConfigError("param '" + key + "' must be a number");
    return v.get<double>();
}

double ExperimentConfig::param_number(const std::string& key, double fallback) const {
    if (!params_.contains(key)) return fallback;
    return param_number(key);
}

int ExperimentConfig::param_int(const std::string& key) const {
    const auto& v = need(params_, key);
    if (!v.is_number_integer()) throw ConfigError("param '" + key + "' must be an integer");
    return v.get<int>();
}

int ExperimentConfig::param_int(const std::string& key, int fallback) const {
    if (!params_.contains(key)) return fallback;
    return param_int(key);
}

std::vector<double> ExperimentConfig::param_numbers(const std::string& key) const {
    const auto& v = need(params_, key);
    if (!v.is_array() || v.empty())
        throw ConfigError("param '" + key + "' must be a nonempty array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError("param '" + key + "' must contain numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<double> ExperimentConfig::param_numbers(
    const std::string& key, const std::vector<double>& fallback) const {
    if (!params_.contains(key)) return fallback;
    return param_numbers(key);
}

std::vector<int> ExperimentConfig::param_ints(const std::string& key,
                                              const std::vector<int>& fallback) const {
    if (!params_.contains(key)) return fallback;
    const auto& v = params_.at(key);
    if (!v.is_array() || v.empty())
        throw ConfigError("param '" + key + "' must be a nonempty array");
    std::vector<int> out;
    for (const auto& x : v) {
        if (!x.is_number_integer())
            throw ConfigError("param '" + key + "' must contain integers");
        out.push_back(x.get<int>());
    }
    return out;
}

std::string ExperimentConfig::param_string(const std::string& key,
                                           const std::string& fallback) const {
    if (!params_.contains(key)) return fallback;
    const auto& v = params_.at(key);
    if (!v.is_string()) throw ConfigError("param '" + key + "' must be a string");
    return v.get<std::string>();
}

bool ExperimentConfig::param_bool(const std::string& key, bool fallback) const {
    if (!params_.contains(key)) return fallback;
    const auto& v = params_.at(key);
    if (!v.is_boolean()) throw ConfigError("param '" + key + "' must be a boolean");
    return v.get<bool>();
}

double resolve_beta(const ExperimentConfig& config, const LocalHamiltonian& h) {
    if (config.params().contains("beta")) return config.param_number("beta");
    const double factor = config.param_number("beta_star_factor", 0.5);
    const int dim = std::max(1, h.graph().spatial_dim());
    const double alpha = config.param_number("alpha", growth_constant_bound(dim));
    const double j = h.interaction_strength();
    return factor * beta_star(alpha, j);
}

} // namespace thermalab
