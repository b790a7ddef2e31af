#pragma once

// Dataset files written by `gen`:
//   ica:    ica.csv (x0..x{p-1}, one observation per row) + truth.json
//   logreg: logreg.csv (x0..x{p-1}, y in {-1, 1}, split in {train, validation, test}) + truth.json

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "coinsamp/harness/csv.hpp"
#include "coinsamp/ica.hpp"
#include "coinsamp/logreg.hpp"

namespace coinsamp::harness {

namespace fs = std::filesystem;

inline std::string split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

inline Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  throw IoError("unknown split marker '" + s + "'");
}

inline nlohmann::json matrix_json(const Matrix& m) {
  auto j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) row[static_cast<std::size_t>(k)] = m(i, k);
    j.push_back(row);
  }
  return j;
}

inline Matrix json_matrix(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw IoError("ragged matrix in JSON");
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return m;
}

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

/// Writes ica.csv and truth.json into `dir`; returns the data path.
inline fs::path write_ica(const fs::path& dir, const IcaProblem& prob) {
  fs::create_directories(dir);
  const fs::path data = dir / "ica.csv";
  write_matrix_csv(data, prob.data, snapshot_header(prob.p));
  write_json(dir / "truth.json", {{"family", "ica"},
                                  {"p", prob.p},
                                  {"n", prob.n()},
                                  {"seed", prob.seed},
                                  {"w_true", matrix_json(prob.w_true)}});
  return data;
}

inline fs::path write_logreg(const fs::path& dir, const LogRegDataset& ds) {
  fs::create_directories(dir);
  const fs::path data = dir / "logreg.csv";
  auto header = snapshot_header(ds.features.cols());
  header.emplace_back("y");
  header.emplace_back("split");
  CsvWriter w(data, header);
  for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
    std::vector<std::string> cells;
    for (Eigen::Index k = 0; k < ds.features.cols(); ++k) cells.push_back(format_double(ds.features(i, k)));
    cells.push_back(ds.labels[i] > 0.0 ? "1" : "-1");
    cells.push_back(split_name(ds.split[static_cast<std::size_t>(i)]));
    w.write_row(cells);
  }
  std::vector<double> wt(ds.w_true.data(), ds.w_true.data() + ds.w_true.size());
  write_json(dir / "truth.json", {{"family", "logreg"},
                                  {"p", ds.features.cols()},
                                  {"n", ds.features.rows()},
                                  {"seed", ds.seed},
                                  {"w_true", wt}});
  return data;
}

/// Ground-truth unmixing matrix from a truth.json sidecar.
inline Matrix read_ica_truth(const fs::path& path) {
  const auto j = read_json(path);
  try {
    return json_matrix(j.at("w_true"));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

inline IcaProblem read_ica(const fs::path& data) {
  IcaProblem prob;
  prob.data = read_snapshot(data);
  prob.p = prob.data.cols();
  const fs::path truth = data.parent_path() / "truth.json";
  if (fs::exists(truth)) {
    prob.w_true = read_ica_truth(truth);
    const auto j = read_json(truth);
    if (j.contains("seed")) prob.seed = j["seed"].get<std::uint64_t>();
  }
  return prob;
}

inline LogRegDataset read_logreg(const fs::path& data) {
  const CsvTable t = read_csv(data);
  LogRegDataset ds;
  ds.features = table_matrix(t, coordinate_columns(t));
  const Matrix y = table_matrix(t, {t.column("y")});
  ds.labels = y.col(0);
  for (Eigen::Index i = 0; i < ds.labels.size(); ++i)
    if (ds.labels[i] != 1.0 && ds.labels[i] != -1.0) throw IoError(data.string() + ": labels must be -1 or 1");
  const std::size_t sc = t.column("split");
  for (const auto& row : t.rows) ds.split.push_back(parse_split(row[sc]));
  return ds;
}

}  // namespace coinsamp::harness
