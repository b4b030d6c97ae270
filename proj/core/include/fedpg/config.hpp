#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fedpg/env.hpp"
#include "fedpg/federated.hpp"

namespace fedpg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully resolved run description. `resolved_json` is the canonical text
/// written next to every output.
struct RunConfig {
  std::uint64_t seed = 1;
  ScenarioTemplate scenario;
  Heterogeneity heterogeneity;
  TrainingConfig training;
  int checkpoint_every = 0;
  int eval_runs = 100;
  int eval_horizon = 30;
  std::string resolved_json;
};

/// The schema, populated with the full-scale defaults.
std::string default_config_json();

/// Parses `json_text` over the defaults, then applies dotted-path overrides
/// of the form "training.sigma_far=3.0". Unknown keys, type mismatches and
/// out-of-range values raise ConfigError.
RunConfig parse_config(std::string_view json_text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

}  // namespace fedpg
