#pragma once

#include "vrstab/harness.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vrstab {

/// One or more problems with a configuration document, one per entry.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out;
    for (const auto& e : errors) {
      if (!out.empty()) out += "; ";
      out += e;
    }
    return out;
  }

  std::vector<std::string> errors_;
};

struct ValidatedConfig {
  ExperimentConfig config;
  std::vector<std::string> warnings;
};

/// Parses JSON text; syntax errors become a ConfigError.
nlohmann::json parse_config_text(std::string_view text);

/// Applies "a.b.c=value". The value is read as JSON when it parses and as a
/// plain string otherwise. Missing intermediate objects are created.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Checks every key and fills defaults. Collects all problems before
/// throwing ConfigError.
ValidatedConfig validate_config(const nlohmann::json& doc);

/// Reads the file, applies the overrides in order, validates.
ValidatedConfig load_config(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides);

/// α implied by the config alone, when the data is known to be unit norm.
std::optional<double> predicted_alpha(const ExperimentConfig& cfg);

/// Warnings for step sizes above 1/(2α), where the bounds say nothing.
std::vector<std::string> step_size_warnings(const ExperimentConfig& cfg, double alpha);

}  // namespace vrstab
