#pragma once

#include "json.hpp"

#include <string_view>

namespace synact::toml {

// Parses the TOML subset used by pipeline configs into JSON: tables,
// arrays of tables, dotted keys, basic and literal strings, integers
// (decimal, hex, underscores), floats (inf/nan), booleans, arrays and
// inline tables. Dates and multi-line strings raise
// UnsupportedFeatureError; malformed input raises ParseError with a line.
nlohmann::json parse(std::string_view text);

}  // namespace synact::toml
