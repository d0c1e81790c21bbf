#pragma once

#include <optional>
#include <string>

namespace thermalab {

struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
};

/// Exit codes: 0 success, 2 config error, 3 regime error, 4 resource error,
/// 1 anything else.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRegime = 3;
inline constexpr int kExitResource = 4;

/// Loads the config, runs the experiment, writes CSV data plus a JSON run
/// manifest, and maps failures onto the exit codes above.
int run_from_config(const std::string& config_path, const CliOverrides& overrides);

/// Prints the registry table to stdout.
void print_experiment_list();

inline constexpr const char* kVersion = "0.1.0";

} // namespace thermalab
