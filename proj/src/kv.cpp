#include "gwl/kv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "gwl/error.hpp"
#include "gwl/format.hpp"

namespace gwl {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

KeyValues KeyValues::parse(std::istream& in, const std::string& source) {
  KeyValues kv;
  kv.source_ = source;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InputError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw InputError(source + ":" + std::to_string(lineno) + ": empty key");
    if (!kv.entries_.emplace(key, value).second) {
      throw InputError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

KeyValues KeyValues::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse(in, path.string());
}

const std::string& KeyValues::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw InputError(source_ + ": missing key '" + key + "'");
  return it->second;
}

std::string KeyValues::get(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_double(get(key));
  } catch (const InputError&) {
    throw InputError(source_ + ": key '" + key + "' is not a number: '" + get(key) + "'");
  }
}

int KeyValues::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = get(key);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError(source_ + ": key '" + key + "' is not an integer: '" + s + "'");
  }
  return v;
}

std::uint64_t KeyValues::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = get(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError(source_ + ": key '" + key + "' is not an unsigned integer: '" + s + "'");
  }
  return v;
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = get(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InputError(source_ + ": key '" + key + "' is not a boolean: '" + s + "'");
}

std::vector<double> KeyValues::get_doubles(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const std::string& item : split_list(get(key))) {
    try {
      out.push_back(parse_double(item));
    } catch (const InputError&) {
      throw InputError(source_ + ": key '" + key + "' has a non-numeric item '" + item + "'");
    }
  }
  return out;
}

std::vector<int> KeyValues::get_ints(const std::string& key, std::vector<int> fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (const std::string& item : split_list(get(key))) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw InputError(source_ + ": key '" + key + "' has a non-integer item '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

void KeyValues::set(const std::string& key, const std::string& value) { entries_[key] = value; }
void KeyValues::set(const std::string& key, double value) { entries_[key] = format_double(value); }

std::string KeyValues::serialize() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  return out.str();
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

}  // namespace gwl
