#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coinsamp/types.hpp"

namespace coinsamp::harness {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Round-trip formatting for doubles.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> snapshot_header(Eigen::Index d) {
  std::vector<std::string> h;
  for (Eigen::Index j = 0; j < d; ++j) h.push_back("x" + std::to_string(j));
  return h;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws IoError when absent.
  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw IoError("csv: missing column '" + name + "'");
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    out.push_back(cell.substr(b));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Reads a headed CSV file; every row must have as many cells as the header.
inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(t.header.size()) + " cells, found " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw IoError("'" + path.string() + "' is empty");
  return t;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(where + ": '" + s + "' is not a number");
  }
}

/// Numeric matrix from the given columns (all columns when empty).
inline Matrix table_matrix(const CsvTable& t, const std::vector<std::size_t>& columns = {}) {
  std::vector<std::size_t> cols = columns;
  if (cols.empty())
    for (std::size_t j = 0; j < t.header.size(); ++j) cols.push_back(j);
  Matrix m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_double(t.rows[i][cols[j]], "row " + std::to_string(i + 1) + ", column " + t.header[cols[j]]);
  return m;
}

/// Columns named x0, x1, ... in order.
inline std::vector<std::size_t> coordinate_columns(const CsvTable& t) {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0;; ++j) {
    const std::string name = "x" + std::to_string(j);
    std::size_t found = t.header.size();
    for (std::size_t k = 0; k < t.header.size(); ++k)
      if (t.header[k] == name) found = k;
    if (found == t.header.size()) break;
    cols.push_back(found);
  }
  if (cols.empty()) throw IoError("csv: no x0.. coordinate columns");
  return cols;
}

/// Snapshot file: header x0..x{d-1}, one particle per row.
inline Matrix read_snapshot(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  return table_matrix(t, coordinate_columns(t));
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw IoError("cannot write '" + path.string() + "'");
    write_row(header);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  void write_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_double(v));
    write_row(cells);
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

inline void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                             const std::vector<std::string>& header) {
  if (static_cast<Eigen::Index>(header.size()) != m.cols()) throw IoError("csv: header/column count mismatch");
  CsvWriter w(path, header);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    w.write_row(row);
  }
}

inline void write_snapshot(const std::filesystem::path& path, const Matrix& positions) {
  write_matrix_csv(path, positions, snapshot_header(positions.cols()));
}

}  // namespace coinsamp::harness
