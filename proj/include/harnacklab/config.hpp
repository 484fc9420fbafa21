#pragma once

// Plain-text key=value configuration. '#' starts a comment, blank lines are
// skipped, keys are case sensitive and may appear once.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "harnacklab/grushin_geometry.hpp"

namespace hlab::config {

struct Value {
  std::string text;
  int line = 0;
};

class KeyValues {
 public:
  static KeyValues parse(std::istream& in, const std::string& source = "<config>");
  static KeyValues parse_text(const std::string& text, const std::string& source = "<config>");
  static KeyValues load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = {value, 0}; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;

  /// Throws ConfigError naming the first key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

  const std::map<std::string, Value>& values() const { return values_; }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

  std::string source_;
  std::map<std::string, Value> values_;
};

/// "129x65" -> {129, 65}.
std::pair<int, int> parse_grid(const std::string& text);

/// "x1min,x1max,x2min,x2max".
grushin::Rect parse_window(const std::string& text);

}  // namespace hlab::config
