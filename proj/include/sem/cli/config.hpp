#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sem/engine.hpp"

namespace sem::cli {

/// Invalid experiment configuration. key() names the offending JSON key
/// using dotted paths ("hurst.params", "converge.levels").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct FunctionSpec {
  std::string name;
  std::vector<double> params;
  bool operator==(const FunctionSpec&) const = default;
};

struct ConvergeBlock {
  std::size_t levels = 4;
  std::size_t refine_factor = 2;
  bool operator==(const ConvergeBlock&) const = default;
};

struct HolderBlock {
  double q = 2.0;
  std::vector<std::size_t> lags;  // empty: dyadic lags up to min(64, N/4)
  bool operator==(const HolderBlock&) const = default;
};

struct AcfBlock {
  std::size_t max_lag = 20;
  bool operator==(const AcfBlock&) const = default;
};

struct MomentsBlock {
  std::vector<double> p{2.0, 4.0};
  std::vector<std::size_t> nodes;  // empty: the last node
  bool operator==(const MomentsBlock&) const = default;
};

struct ExperimentConfig {
  std::string process = "sem";  // "sem" or "sem_gamma"
  FunctionSpec hurst;
  std::optional<FunctionSpec> dampening;
  double T = 1.0;
  std::size_t N = 100;
  std::uint64_t seed = 0;
  std::size_t n_paths = 1;
  std::optional<std::string> label;
  std::optional<ConvergeBlock> converge;
  std::optional<HolderBlock> holder;
  std::optional<AcfBlock> acf;
  std::optional<MomentsBlock> moments;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Schema validation. Unknown keys, wrong types and out-of-range values all
/// raise ConfigError before any computation.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

nlohmann::json to_json(const ExperimentConfig& config);

SimulationConfig build_simulation(const ExperimentConfig& config);

}  // namespace sem::cli
