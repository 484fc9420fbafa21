#include "harnacklab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace hlab::config {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

KeyValues KeyValues::parse(std::istream& in, const std::string& source) {
  KeyValues kv;
  kv.source_ = source;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line) + ": expected key=value, got '" + s + "'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line) + ": empty key");
    if (kv.values_.count(key))
      throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "' (first on line " +
                        std::to_string(kv.values_[key].line) + ")");
    kv.values_[key] = {value, line};
  }
  return kv;
}

KeyValues KeyValues::parse_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse(in, source);
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse(in, path);
}

void KeyValues::fail(const std::string& key, const std::string& what) const {
  auto it = values_.find(key);
  std::string where = source_;
  if (it != values_.end() && it->second.line > 0) where += ":" + std::to_string(it->second.line);
  throw ConfigError(where + ": key '" + key + "': " + what);
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second.text;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double v = 0.0;
  if (!parse_number(it->second.text, v)) fail(key, "expected a number, got '" + it->second.text + "'");
  return v;
}

long long KeyValues::get_int(const std::string& key, long long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second.text;
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(key, "expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t KeyValues::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second.text;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(key, "expected an unsigned integer, got '" + s + "'");
  return v;
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second.text;
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  fail(key, "expected a boolean, got '" + s + "'");
}

std::vector<std::string> KeyValues::get_list(const std::string& key, const std::vector<std::string>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  auto items = split(it->second.text, ',');
  items.erase(std::remove(items.begin(), items.end(), std::string()), items.end());
  return items;
}

void KeyValues::require_known(const std::vector<std::string>& known) const {
  for (const auto& [key, v] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) fail(key, "unknown key");
  }
}

std::pair<int, int> parse_grid(const std::string& text) {
  auto x = text.find('x');
  if (x == std::string::npos) throw ConfigError("grid must look like n1xn2, got '" + text + "'");
  int n1 = 0;
  int n2 = 0;
  auto a = text.substr(0, x);
  auto b = text.substr(x + 1);
  auto r1 = std::from_chars(a.data(), a.data() + a.size(), n1);
  auto r2 = std::from_chars(b.data(), b.data() + b.size(), n2);
  if (r1.ec != std::errc() || r1.ptr != a.data() + a.size() || r2.ec != std::errc() || r2.ptr != b.data() + b.size())
    throw ConfigError("grid must look like n1xn2, got '" + text + "'");
  if (n1 < 9 || n2 < 9) throw ConfigError("grid needs at least 9 nodes per direction, got '" + text + "'");
  return {n1, n2};
}

grushin::Rect parse_window(const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 4) throw ConfigError("window must be x1min,x1max,x2min,x2max, got '" + text + "'");
  double v[4];
  for (int k = 0; k < 4; ++k) {
    if (!parse_number(parts[k], v[k])) throw ConfigError("window entry '" + parts[k] + "' is not a number");
  }
  if (!(v[0] < v[1]) || !(v[2] < v[3])) throw ConfigError("window bounds must be increasing, got '" + text + "'");
  return {{v[0], v[2]}, {v[1], v[3]}};
}

}  // namespace hlab::config
