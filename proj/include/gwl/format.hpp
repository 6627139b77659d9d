#pragma once

#include <span>
#include <string>

namespace gwl {

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Fixed number of decimals, for human-facing tables.
std::string format_fixed(double v, int decimals);

std::string join_doubles(std::span<const double> values, char sep = ' ');

double parse_double(const std::string& text);

}  // namespace gwl
