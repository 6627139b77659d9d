#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace gwl {

/// Flat `key = value` document. Keys use dotted sections; '#' starts a
/// comment line. Duplicate keys are rejected.
class KeyValues {
 public:
  static KeyValues parse(std::istream& in, const std::string& source = "<input>");
  static KeyValues read(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma- or space-separated numbers.
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback = {}) const;
  std::vector<int> get_ints(const std::string& key, std::vector<int> fallback = {}) const;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);

  const std::map<std::string, std::string>& entries() const { return entries_; }
  /// Keys in sorted order, one `key = value` line each.
  std::string serialize() const;

 private:
  std::string source_;
  std::map<std::string, std::string> entries_;
};

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace gwl
