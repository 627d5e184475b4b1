#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pdnet::csv {

/// Splits on commas and trims surrounding whitespace. No quoting support.
std::vector<std::string> split(std::string_view line);

/// Full-string strtod; throws std::invalid_argument on trailing garbage.
double to_double(const std::string& field);

}  // namespace pdnet::csv
