#pragma once

// Flat CSV files: '#'-prefixed "key=value" metadata lines, one column-name
// row, then numeric rows written with 17 significant digits.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kicked::io {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::vector<std::pair<std::string, std::string>> meta,
            std::vector<std::string> columns)
      : meta_(std::move(meta)), columns_(std::move(columns)) {}

  void add_row(const std::vector<double>& row) {
    if (row.size() != columns_.size())
      throw std::invalid_argument("csv row width does not match the header");
    rows_.push_back(row);
  }

  std::string str() const {
    std::ostringstream os;
    for (const auto& [k, v] : meta_) os << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
      os << '\n';
    }
    return os.str();
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << str();
    if (!f) throw std::runtime_error("failed writing " + path);
  }

 private:
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool has_column(const std::string& name) const {
    for (const auto& c : columns)
      if (c == name) return true;
    return false;
  }

  std::vector<double> column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[i]);
        return out;
      }
    throw std::out_of_range("csv has no column '" + name + "'");
  }

  double meta_number(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) throw std::out_of_range("csv has no metadata '" + key + "'");
    return std::strtod(it->second.c_str(), nullptr);
  }
};

inline CsvTable parse_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) t.meta[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header) {
      t.columns = std::move(cells);
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size())
      throw std::runtime_error("csv row width does not match the header");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
    t.rows.push_back(std::move(row));
  }
  if (!header) throw std::runtime_error("csv has no header row");
  return t;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return parse_csv(f);
}

}  // namespace kicked::io
