#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sem/cli/config.hpp"

namespace sem::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kSeedRule =
    "splitmix64-v1: path_seed = mix64(seed + 0x9e3779b97f4a7c15 * (path_index + 1))";

/// One of: simulate, converge, holder, acf, moments.
struct RunResult {
  std::vector<std::filesystem::path> artifacts;  // data files, manifest last
  std::string summary;                            // human-readable, for stdout
};

/// Runs `command` and writes its data files plus manifest.json into
/// output_dir. Data file bytes depend only on the configuration.
RunResult run_command(std::string_view command, const ExperimentConfig& config,
                      const std::filesystem::path& output_dir, std::size_t threads);

/// Shortest decimal that parses back to the same double.
std::string format_real(double value);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

/// Full CLI entry point; returns 0 on success, 2 on configuration or usage
/// errors and 3 on runtime failures.
int run_main(int argc, char** argv);

}  // namespace sem::cli
