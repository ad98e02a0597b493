#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "hsdiff/errors.hpp"

namespace hsdiff {

// Flat key=value run configuration. Keys must be declared with a default
// before they can be set, so a typo in a file or flag is an error rather
// than a silently ignored knob. Precedence: defaults, then file, then
// explicit set() calls (command-line flags).
class KvConfig {
 public:
  void declare(const std::string& key, const std::string& default_value) {
    values_[key] = default_value;
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, const std::string& value) {
    const auto it = values_.find(key);
    if (it == values_.end())
      throw ArgumentError("unknown config key: " + key);
    it->second = value;
  }

  // key=value lines; blank lines and lines starting with '#' are skipped.
  void apply_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw FormatError(path + ":" + std::to_string(lineno) +
                          ": expected key=value");
      set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
  }

  const std::string& get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
      throw ArgumentError("unknown config key: " + key);
    return it->second;
  }

  long long get_int(const std::string& key) const {
    return parse<long long>(key);
  }
  std::uint64_t get_u64(const std::string& key) const {
    return parse<std::uint64_t>(key);
  }
  double get_double(const std::string& key) const {
    return parse<double>(key);
  }

  bool get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ArgumentError("config key " + key + ": expected boolean, got " + v);
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  // Fully resolved state, one sorted key=value per line; rereading the
  // snapshot through apply_file reproduces this configuration.
  void write_snapshot(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot write config snapshot: " + path);
    for (const auto& [k, v] : values_) os << k << "=" << v << "\n";
    if (!os) throw IoError("write failed: " + path);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  template <typename T>
  T parse(const std::string& key) const {
    const std::string& v = get(key);
    std::istringstream is(v);
    T out{};
    if (!(is >> out) || !(is >> std::ws).eof())
      throw ArgumentError("config key " + key + ": cannot parse value " + v);
    return out;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace hsdiff
