#pragma once

// Declarative experiment configs and the runner behind `dyadic experiment`. Output layouts are
// described in docs/formats.md.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyadic/geometry.hpp"

namespace dyadic {

/// Invalid config document or flag value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kRecordSchemaVersion = 1;

/// Experiments: equivalence, core, cotlar, growth, commutator, shifts.
struct ExperimentConfig {
  std::string experiment = "equivalence";
  std::size_t n_params = 2;
  std::vector<int> depths{2, 3, 4};
  std::uint64_t seed = 1;
  std::size_t budget = 40;
  std::size_t ensemble = 30;
  std::size_t samples = 4;
  std::string out = "results";

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys and bad values throw ConfigError naming the field.
  static ExperimentConfig from_json(const nlohmann::json& j);
  void validate() const;
};

/// Parses a config document; syntax errors report line and column.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
/// FNV-1a of the canonical config dump without `out`, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct ExperimentOutput {
  std::string csv;   // one row per record, each carrying config_hash and seed
  std::string json;  // summary with the resolved config
};

ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Writes <out>/<experiment>.csv, <out>/<experiment>.json and the replayable <out>/config.json.
void write_experiment(const ExperimentConfig& cfg, const ExperimentOutput& output);

}  // namespace dyadic
