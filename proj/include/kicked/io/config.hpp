#pragma once

// key=value run configuration files and potential specifications.
//
// File format: one "key = value" pair per line, '#' starts a comment.
// Potential syntax:
//   cos                                 V = cos x
//   fourier:cos=a1,a2,...;sin=b1,b2,... V = sum_k a_k cos kx + b_k sin kx

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kicked/errors.hpp"
#include "kicked/model.hpp"

namespace kicked::io {

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys{"lambda",    "hbar",        "period", "tau",
                                          "potential", "half_width",  "grid_points",
                                          "seed",      "steps",       "trajectories"};
  return keys;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!config_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    if (value.empty()) throw ConfigError("config key '" + key + "' has no value");
    out[key] = value;
  }
  return out;
}

inline std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  return parse_config(f);
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') throw ConfigError("'" + key + "' is not a number: " + v);
  return d;
}

inline long parse_long(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long d = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') throw ConfigError("'" + key + "' is not an integer: " + v);
  return d;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

inline Potential parse_potential(const std::string& spec, std::size_t grid_points) {
  const std::string s = trim(spec);
  if (s == "cos") return Potential::cosine(grid_points);
  const std::string prefix = "fourier:";
  if (s.rfind(prefix, 0) == 0) {
    std::vector<double> a, b;
    std::stringstream ss(s.substr(prefix.size()));
    std::string part;
    while (std::getline(ss, part, ';')) {
      part = trim(part);
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw ConfigError("potential: expected cos=... or sin=...");
      const std::string which = trim(part.substr(0, eq));
      auto values = parse_list("potential", part.substr(eq + 1));
      if (which == "cos") a = std::move(values);
      else if (which == "sin") b = std::move(values);
      else throw ConfigError("potential: unknown coefficient list '" + which + "'");
    }
    if (a.empty() && b.empty()) throw ConfigError("potential: no coefficients given");
    return Potential::fourier(std::move(a), std::move(b), grid_points, s);
  }
  throw ConfigError("potential: unknown specification '" + s + "'");
}

}  // namespace kicked::io
