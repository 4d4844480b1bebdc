#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bmms/conjugate.hpp"
#include "bmms/errors.hpp"
#include "bmms/sampler.hpp"

namespace bmms {

// Flat `key = value` configuration with '#' comments. Command-line flags are
// layered on top through set().
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingInput(path.string());
    KeyValueConfig cfg;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ParseError("expected 'key = value'", path.string(), line_no);
      }
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw ParseError("empty key", path.string(), line_no);
      }
      cfg.kv_[key] = value;
    }
    return cfg;
  }

  void set(const std::string& key, const std::string& value) {
    kv_[key] = value;
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_string(const std::string& key,
                         const std::string& fallback = "") const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  std::string require_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end() || it->second.empty()) {
      throw InvalidConfig("missing required config key: " + key);
    }
    return it->second;
  }

  long get_int(const std::string& key, long fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return parse_int(key, it->second);
  }

  long require_int(const std::string& key) const {
    return parse_int(key, require_string(key));
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return parse_double(key, it->second);
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw InvalidConfig("config key '" + key + "' is not a boolean: " + v);
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  static std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
  }

  static long parse_int(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long out = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
      throw InvalidConfig("config key '" + key + "' is not an integer: " + v);
    }
    return out;
  }

  static double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
      throw InvalidConfig("config key '" + key + "' is not a number: " + v);
    }
    return out;
  }

  std::map<std::string, std::string> kv_;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace detail

// Parse "noise = jeffreys | fixed:<v> | invgamma:<a>:<b>".
inline NoisePrior parse_noise_prior(const std::string& text) {
  const auto parts = detail::split(text, ':');
  if (parts[0] == "jeffreys" && parts.size() == 1) {
    return NoisePrior::jeffreys();
  }
  if (parts[0] == "fixed" && parts.size() == 2) {
    return NoisePrior::fixed(std::stod(parts[1]));
  }
  if (parts[0] == "invgamma" && parts.size() == 3) {
    return NoisePrior::inverse_gamma(std::stod(parts[1]), std::stod(parts[2]));
  }
  throw InvalidConfig("bad noise spec: " + text);
}

inline GaussianPrior parse_level_prior(const std::string& text) {
  if (text == "unit_info") return GaussianPrior::unit_information();
  if (text == "flat") return GaussianPrior::flat();
  throw InvalidConfig("bad prior spec: " + text);
}

// Parse the per-scale module list, e.g.
//   "changepoint:1,changepoint:2,changepoint:4"
//   "conjugate:32,conjugate:128"   (parameter = resolution size)
//   "voronoi:2,voronoi:4"          (parameter = center count)
struct ParsedModule {
  ModuleSpec::Kind kind = ModuleSpec::Kind::ConjugateGaussian;
  Index parameter = 1;
};

inline std::vector<ParsedModule> parse_module_list(const std::string& text) {
  std::vector<ParsedModule> modules;
  for (const auto& item : detail::split(text, ',')) {
    const auto parts = detail::split(item, ':');
    if (parts.size() != 2 || parts[1].empty()) {
      throw InvalidConfig("bad module spec: '" + item +
                          "' (expected kind:parameter)");
    }
    ParsedModule m;
    if (parts[0] == "conjugate") {
      m.kind = ModuleSpec::Kind::ConjugateGaussian;
    } else if (parts[0] == "changepoint") {
      m.kind = ModuleSpec::Kind::Changepoint;
    } else if (parts[0] == "voronoi") {
      m.kind = ModuleSpec::Kind::Voronoi;
    } else {
      throw InvalidConfig("unknown module kind: " + parts[0]);
    }
    m.parameter = std::stol(parts[1]);
    if (m.parameter < 1) throw InvalidConfig("bad module parameter: " + item);
    modules.push_back(m);
  }
  if (modules.empty()) throw InvalidConfig("empty module list");
  return modules;
}

}  // namespace bmms
