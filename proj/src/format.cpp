#include "gwl/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "gwl/error.hpp"

namespace gwl {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_fixed(double v, int decimals) {
  if (!std::isfinite(v)) return format_double(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string join_doubles(std::span<const double> values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += format_double(values[i]);
  }
  return out;
}

double parse_double(const std::string& text) {
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0.0;
  const char* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || first == text.data() + text.size()) {
    throw InputError("not a number: '" + text + "'");
  }
  return v;
}

}  // namespace gwl
