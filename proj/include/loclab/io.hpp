#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace loclab::io {

/// start:stop:step range (inclusive stop); a bare number is a single point.
struct GridRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;
};

inline std::vector<double> expand(const GridRange& g) {
  if (g.step <= 0.0) throw std::invalid_argument("grid step must be positive");
  if (g.stop < g.start) throw std::invalid_argument("grid stop must be >= start");
  const double eps = 1e-9 * std::max(1.0, std::abs(g.step));
  const auto count = static_cast<std::size_t>((g.stop - g.start + eps) / g.step) + 1;
  std::vector<double> values;
  values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double x = g.start + static_cast<double>(i) * g.step;
    if (std::abs(x - g.stop) <= eps) x = g.stop;  // snap the endpoint exactly
    values.push_back(x);
  }
  return values;
}

inline GridRange parse_grid(const std::string& text) {
  GridRange g;
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) {
    g.start = g.stop = std::stod(text);
    g.step = 1.0;
    return g;
  }
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw std::invalid_argument("grid must be 'value' or 'start:stop:step': " + text);
  g.start = std::stod(text.substr(0, c1));
  g.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  g.step = std::stod(text.substr(c2 + 1));
  return g;
}

/// Lossless float formatting (17 significant digits).
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Write-then-rename so readers never observe a partial file.
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

/// Flat INI-style config: [section] headers, key = value lines,
/// '#' or ';' comments. Keys are stored as "section.key".
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::map<std::string, std::string> values;
  std::string line, section;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    const auto b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    values[section.empty() ? key : section + "." + key] = value;
  }
  return values;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace loclab::io
