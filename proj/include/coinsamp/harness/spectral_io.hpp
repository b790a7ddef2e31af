#pragma once

// Spectral table file (JSON):
//   {"format": "coinsamp-spectral-table", "version": 1, "lo": .., "hi": ..,
//    "nodes": n, "modes": m, "eigenvalues": [m], "weights": [n],
//    "eigenfunctions": [[n] x m]}   (mode-major, values at the grid nodes)

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "coinsamp/harness/csv.hpp"
#include "coinsamp/spectral.hpp"

namespace coinsamp::harness {

inline constexpr int kSpectralTableVersion = 1;

inline nlohmann::json spectral_to_json(const SpectralKernelTable& t) {
  nlohmann::json j;
  j["format"] = "coinsamp-spectral-table";
  j["version"] = kSpectralTableVersion;
  j["lo"] = t.lo();
  j["hi"] = t.hi();
  j["nodes"] = t.nodes();
  j["modes"] = t.modes();
  j["eigenvalues"] = std::vector<double>(t.eigenvalues().data(), t.eigenvalues().data() + t.modes());
  j["weights"] = std::vector<double>(t.weights().data(), t.weights().data() + t.nodes());
  auto& ef = j["eigenfunctions"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < t.modes(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(t.nodes()));
    for (Eigen::Index k = 0; k < t.nodes(); ++k) row[static_cast<std::size_t>(k)] = t.eigenfunctions()(i, k);
    ef.push_back(row);
  }
  return j;
}

inline SpectralKernelTable spectral_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "coinsamp-spectral-table") throw IoError("spectral table: wrong format tag");
    if (j.at("version").get<int>() != kSpectralTableVersion)
      throw IoError("spectral table: unsupported version " + j.at("version").dump());
    const auto n = j.at("nodes").get<Eigen::Index>();
    const auto m = j.at("modes").get<Eigen::Index>();
    const auto ev = j.at("eigenvalues").get<std::vector<double>>();
    const auto w = j.at("weights").get<std::vector<double>>();
    const auto& ef = j.at("eigenfunctions");
    if (static_cast<Eigen::Index>(ev.size()) != m || static_cast<Eigen::Index>(w.size()) != n ||
        static_cast<Eigen::Index>(ef.size()) != m)
      throw IoError("spectral table: inconsistent sizes");
    Matrix phi(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto row = ef[static_cast<std::size_t>(i)].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != n) throw IoError("spectral table: ragged eigenfunction row");
      for (Eigen::Index k = 0; k < n; ++k) phi(i, k) = row[static_cast<std::size_t>(k)];
    }
    return {j.at("lo").get<double>(), j.at("hi").get<double>(), Eigen::Map<const Vector>(ev.data(), m), phi,
            Eigen::Map<const Vector>(w.data(), n)};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("spectral table: ") + e.what());
  }
}

inline void save_spectral(const std::filesystem::path& path, const SpectralKernelTable& t) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << spectral_to_json(t).dump() << '\n';
}

inline SpectralKernelTable load_spectral(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return spectral_from_json(j);
}

}  // namespace coinsamp::harness
