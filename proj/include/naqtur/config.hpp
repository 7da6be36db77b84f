// Flat `key = value` experiment configuration with `#` comments.

#pragma once

#include "naqtur/harness.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace naqtur {

// Malformed configuration or command line; maps to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

// `source` is used in error messages ("file:line").
ConfigEntries parse_config_text(std::string_view text, std::string_view source);
ConfigEntries read_config_file(const std::string& path);

// Every ExperimentConfig and CollisionConfig field, by key.
const std::vector<std::string>& config_keys();

// Throws UsageError on an unknown key or an unparsable value.
void apply_config_entry(ExperimentConfig& config, std::string_view key, std::string_view value);
void apply_config_entries(ExperimentConfig& config, const ConfigEntries& entries);

// Inverse of apply_config_entry: one `key = value` line per key.
std::string format_config(const ExperimentConfig& config);

std::uint64_t parse_seed(std::string_view text);

struct SeedChoice {
  std::uint64_t seed = 0;
  std::string source;  // "flag", "config", "NAQTUR_SEED" or "default"
};

// Precedence: flag, config file, environment, default 0.
SeedChoice resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> from_config,
                        const char* env_value);

}  // namespace naqtur
