#pragma once

#include <string>
#include <vector>

#include "depsvm/harness.hpp"
#include "depsvm/toml.hpp"

namespace depsvm {

struct ResolvedConfig {
  ExperimentConfig experiment;
  toml::Table resolved;  // full config with every default echoed
  std::vector<std::string> warnings;
  int mixing_lags = 10;           // [mixing] lags
  int simulate_n = 1000;          // [simulate] n
  std::uint64_t simulate_seed = 1;
};

/// Parses, applies key=value overrides, validates (unknown keys rejected),
/// and resolves defaults.
ResolvedConfig load_config(const std::string& path,
                           const std::vector<std::string>& overrides);

ResolvedConfig config_from_table(toml::Table doc);

}  // namespace depsvm
