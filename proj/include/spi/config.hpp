#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "spi/experiment.hpp"

namespace spi {

// Raised for unknown keys, wrong value types and invariant violations.
// The message always names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResolvedConfig {
  std::string preset = "none";
  SweepConfig sweep;  // fully defaulted; threads 0 means available parallelism
  std::string digest;
};

ResolvedConfig parse_config_text(std::string_view text);
ResolvedConfig parse_config(const std::filesystem::path& path);

// Human-readable key reference with defaults, shown by `spi info`.
std::string config_reference();

}  // namespace spi
