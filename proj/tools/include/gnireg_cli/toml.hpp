#pragma once

#include <string>

#include "json.hpp"

namespace gnireg::cli {

// Reads the TOML subset used by experiment configs: [table] and
// [table.sub] headers, key = value pairs, basic strings, integers, floats,
// booleans, and (nested) arrays of those. Comments start with '#'.
// Throws ConfigError with the line number on anything else.
nlohmann::json parse_toml(const std::string& text);

}  // namespace gnireg::cli
