#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bmms/errors.hpp"

namespace bmms {

struct Table {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;
};

// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline void write_csv(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(table.values(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

inline void write_csv(const std::filesystem::path& path,
                      const Eigen::MatrixXd& values,
                      std::vector<std::string> columns) {
  if (static_cast<Eigen::Index>(columns.size()) != values.cols()) {
    throw InvalidDimension("write_csv: header does not match column count");
  }
  write_csv(path, Table{std::move(columns), values});
}

// Numbered columns like x1..xp.
inline std::vector<std::string> numbered_columns(const std::string& stem,
                                                 Eigen::Index count) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 1; i <= count; ++i) {
    names.push_back(stem + std::to_string(i));
  }
  return names;
}

namespace detail {

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

// Read a CSV with a mandatory header row; every data cell must parse as a
// double in full.
inline Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput(path.string());

  Table table;
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError("empty file, expected header row", path.string(), 1);
  }
  ++line_no;
  table.columns = detail::split_line(line);
  const auto cols = static_cast<Eigen::Index>(table.columns.size());

  std::vector<double> data;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != cols) {
      throw ParseError("expected " + std::to_string(cols) + " fields, got " +
                           std::to_string(fields.size()),
                       path.string(), line_no);
    }
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0') {
        throw ParseError("not a number: '" + f + "'", path.string(), line_no);
      }
      data.push_back(v);
    }
    ++rows;
  }
  table.values.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      table.values(i, j) = data[static_cast<std::size_t>(i * cols + j)];
    }
  }
  return table;
}

}  // namespace bmms
