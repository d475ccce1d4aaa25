#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace gnireg::cli {

// Bad configuration or command line; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Default document for a subcommand. Every key a config file may set
// appears here, so unknown keys can be rejected with their path.
nlohmann::json default_config(const std::string& command);

// Parses a config file (.toml, or .json) into a JSON document.
nlohmann::json load_config_file(const std::filesystem::path& path);

// Recursively overlays `overrides` onto `base`. Keys absent from `base` are
// errors reported with their dotted path; so are type mismatches.
void merge_config(nlohmann::json& base, const nlohmann::json& overrides,
                  const std::string& path = "");

// Typed accessors that report the dotted path on failure.
double get_number(const nlohmann::json& cfg, const std::string& path);
std::int64_t get_int(const nlohmann::json& cfg, const std::string& path);
std::size_t get_count(const nlohmann::json& cfg, const std::string& path);
bool get_bool(const nlohmann::json& cfg, const std::string& path);
std::string get_string(const nlohmann::json& cfg, const std::string& path);
const nlohmann::json& get_node(const nlohmann::json& cfg, const std::string& path);
nlohmann::json& set_node(nlohmann::json& cfg, const std::string& path);

}  // namespace gnireg::cli
