#pragma once

#include "tfsmell/catalog.hpp"
#include "tfsmell/detectors.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tfsmell {

/// Error in a configuration document. `line`/`column` are 1-based and point
/// at the offending key (or the syntax error), 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::size_t line, std::size_t column)
      : std::runtime_error(message), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Reads a DetectorConfig from JSON. Fields that are absent keep their
/// defaults; unknown fields and wrongly typed values are errors.
DetectorConfig parse_detector_config(std::string_view json_text);

/// Canonical JSON for a config (sorted keys, no whitespace).
std::string to_json(const DetectorConfig& cfg);

/// Lowercase hex SHA-256 of the canonical JSON.
std::string config_digest(const DetectorConfig& cfg);

struct LoadedConfig {
  DetectorConfig detectors;
  Catalog catalog;
};

/// Defaults when a path is not given. Throws ConfigError.
LoadedConfig load_config(const std::optional<std::string>& config_path,
                         const std::optional<std::string>& catalog_path = std::nullopt);

}  // namespace tfsmell
