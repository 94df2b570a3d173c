#pragma once

// Flat key-value configuration: one `key = value` pair per line, `#`
// comments, dotted keys for nesting. Unknown and duplicate keys are hard
// errors carrying the offending key and line number.

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ryd {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class Config {
 public:
  static Config parse_string(const std::string& text, const std::string& origin = "<string>") {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const size_t eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": expected 'key = value', got '" + trimmed + "'");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      if (cfg.entries_.count(key))
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                          key + "' (first set at line " +
                          std::to_string(cfg.entries_.at(key).line) + ")");
      cfg.entries_[key] = {value, lineno};
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_.insert(key);
    return it->second.value;
  }

  std::string require_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    consumed_.insert(key);
    return it->second.value;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_.insert(key);
    return parse_double(it->second.value, key, it->second.line);
  }

  long get_long(const std::string& key, long fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_.insert(key);
    try {
      size_t pos = 0;
      const long v = std::stol(it->second.value, &pos);
      if (pos != it->second.value.size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(location(key) + ": expected integer for '" + key + "', got '" +
                        it->second.value + "'");
    }
  }

  // After the consumer has read everything it understands, any leftover
  // key is unknown and rejected by name with its location.
  void reject_unknown_keys() const {
    for (const auto& [key, entry] : entries_)
      if (!consumed_.count(key))
        throw ConfigError(origin_ + ":" + std::to_string(entry.line) +
                          ": unknown key '" + key + "'");
  }

  std::string location(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return origin_;
    return origin_ + ":" + std::to_string(it->second.line);
  }

  static std::string trim(const std::string& s) {
    const std::string ws = " \t\r\n";
    const size_t b = s.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    const size_t e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  double parse_double(const std::string& raw, const std::string& key, int line) const {
    try {
      size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ":" + std::to_string(line) +
                        ": expected number for '" + key + "', got '" + raw + "'");
    }
  }

  std::string origin_;
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> consumed_;
};

}  // namespace ryd
