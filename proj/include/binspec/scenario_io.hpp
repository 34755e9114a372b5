#pragma once

// Scenario files: one `key = value` per line, `#` starts a comment.
//
//   D = 2
//   M = 64
//   sampler_ratio = 1          # optional, default 1
//   omega_bar = 0.25, 0.75
//   bandwidth_bar = 1/64, 1/64
//
// Numbers may be written as decimals or as simple fractions `a/b`.

#include <filesystem>
#include <istream>
#include <string>

#include "binspec/model.hpp"

namespace binspec {

/// Parses and validates; ValidationError messages carry `source:line:`.
Scenario parse_scenario(std::istream& in, const std::string& source = "<input>");
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace binspec
