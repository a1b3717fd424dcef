#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>

namespace dsp::cli {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The schema shipped in schema/experiment_config.schema.json.
const json& config_schema();

/// Throws ConfigError naming the offending path.
void validate_config(const json& config);

/// Validated copy with every schema default filled in.
json resolve_config(const json& config);

/// Reads and parses a JSON file; malformed input is a ConfigError.
json load_config_file(const std::string& path);

}  // namespace dsp::cli
