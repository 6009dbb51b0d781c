#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "srtrec/error.hpp"

namespace srtrec {

/// Flat `key = value` configuration with `#` comments. Later assignments
/// (including --set overrides) win.
class Config {
 public:
  static Config parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (trim(line).empty()) continue;
      c.assign(line, line_no);
    }
    return c;
  }

  /// Applies one `key=value` override.
  void assign(const std::string& kv, std::size_t line_no = 0) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value, got '" + trim(kv) + "'", line_no);
    std::string key = trim(kv.substr(0, eq));
    std::string value = trim(kv.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    values_[key] = value;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Rejects keys outside `allowed`.
  void require_known(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
      if (!allowed.count(k)) throw ParseError("unknown config key '" + k + "'");
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      std::size_t used = 0;
      double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw ParseError("config key '" + key + "' expects a number, got '" + it->second + "'");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ParseError("config key '" + key + "' expects true or false, got '" + it->second + "'");
  }

  long long get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      std::size_t used = 0;
      long long v = std::stoll(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw ParseError("config key '" + key + "' expects an integer, got '" + it->second + "'");
    }
  }

  std::string str() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
    return os.str();
  }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace srtrec
