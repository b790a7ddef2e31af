#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "coinsamp/harness/csv.hpp"
#include "coinsamp/harness/datasets.hpp"
#include "coinsamp/harness/registry.hpp"
#include "coinsamp/harness/spectral_io.hpp"
#include "coinsamp/metrics.hpp"
#include "coinsamp/samplers.hpp"

namespace coinsamp::harness {

inline constexpr int kManifestVersion = 1;
inline constexpr int kCsvSchemaVersion = 1;
inline const std::vector<std::string> kMetricsColumns = {"iteration", "ksd", "energy_distance", "elapsed_ms"};
inline const std::vector<std::string> kSweepColumns = {"learning_rate", "status", "final_ksd",
                                                       "final_energy_distance", "iterations"};

struct RunOptions {
  SamplerConfig sampler;
  std::string target = "gaussian2d";
  /// normal:SD | uniform:LO:HI | file:PATH; empty picks the sampler default.
  std::string init;
  std::size_t checkpoint_every = 50;
  /// Particle snapshots every K iterations (0: final positions only).
  std::size_t snapshot_every = 0;
  /// rbf (median bandwidth unless `bandwidth` is set) or imq.
  std::string kernel = "rbf";
  std::optional<double> bandwidth;
  double imq_c = 1.0;
  double imq_beta = -0.5;
  /// i.i.d. target draws for the energy distance (0 disables it).
  std::size_t reference_size = 10000;
  double grid_lo = -10.0;
  double grid_hi = 10.0;
  std::size_t grid_n = 1000;
  std::size_t modes = 150;
  std::string spectral_in;
  std::size_t batch_size = 100;
  /// Write elapsed_ms = 0 so repeated runs produce identical files.
  bool no_clock = false;
};

struct Checkpoint {
  std::size_t iteration = 0;
  double ksd = 0.0;
  double energy_distance = 0.0;
  double elapsed_ms = 0.0;
};

struct RunRecord {
  nlohmann::json config;
  std::vector<Checkpoint> checkpoints;
  Matrix final_positions;
  RunStatus status = RunStatus::Completed;
  std::string diagnostic;
  std::size_t clamped = 0;
  std::vector<std::string> files;
};

inline std::string default_init(SamplerKind k) {
  switch (k) {
    case SamplerKind::Lawgd:
    case SamplerKind::CoinLawgd: return "uniform:-1:1";
    case SamplerKind::Ksdd:
    case SamplerKind::CoinKsdd: return "normal:0.5";
    default: return "normal:0.1";
  }
}

/// Initial positions from an init spec, drawn from the "init" substream.
inline Matrix initial_positions(const std::string& spec, std::size_t n, std::size_t d, std::uint64_t seed) {
  const auto parts = [&] {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      const auto k = spec.find(':', start);
      out.push_back(spec.substr(start, k - start));
      if (k == std::string::npos) break;
      start = k + 1;
    }
    return out;
  }();
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(d);
  Engine rng = make_engine(seed, "init");
  Matrix x(rows, cols);
  if (parts[0] == "normal" && parts.size() == 2) {
    const double sd = parse_double(parts[1], "init");
    if (!(sd >= 0.0)) throw InvalidArgument("init: standard deviation must be nonnegative");
    std::normal_distribution<double> dist(0.0, 1.0);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = sd * dist(rng);
  } else if (parts[0] == "uniform" && parts.size() == 3) {
    const double lo = parse_double(parts[1], "init");
    const double hi = parse_double(parts[2], "init");
    if (!(lo < hi)) throw InvalidArgument("init: need LO < HI");
    std::uniform_real_distribution<double> dist(lo, hi);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = dist(rng);
  } else if (parts[0] == "file" && parts.size() >= 2) {
    x = read_snapshot(spec.substr(5));
    if (x.rows() != rows || x.cols() != cols)
      throw InvalidArgument("init file has shape " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                            ", expected " + std::to_string(n) + "x" + std::to_string(d));
  } else {
    throw InvalidArgument("init: expected normal:SD, uniform:LO:HI or file:PATH, got '" + spec + "'");
  }
  return x;
}

inline void apply_kernel_options(RunOptions& o) {
  if (o.kernel == "imq") {
    o.sampler.kernel = ImqKernel{o.imq_c, o.imq_beta};
  } else if (o.kernel == "rbf") {
    if (o.bandwidth) o.sampler.kernel = RbfKernel{*o.bandwidth};
    else o.sampler.kernel.reset();
  } else {
    throw InvalidArgument("kernel must be rbf or imq, got '" + o.kernel + "'");
  }
}

inline nlohmann::json config_json(const RunOptions& o) {
  const SamplerConfig& s = o.sampler;
  nlohmann::json j;
  j["sampler"] = std::string(to_string(s.kind));
  j["target"] = o.target;
  j["particles"] = s.particles;
  j["iterations"] = s.iterations;
  j["seed"] = s.seed;
  j["learning_rate"] = s.learning_rate ? nlohmann::json(*s.learning_rate) : nlohmann::json(nullptr);
  j["adagrad"] = s.adagrad;
  j["w0"] = s.w0;
  j["L"] = s.bound ? nlohmann::json(*s.bound) : nlohmann::json(nullptr);
  j["alpha_floor"] = s.alpha ? nlohmann::json(*s.alpha) : nlohmann::json(nullptr);
  j["anneal"] = s.anneal ? nlohmann::json{{"beta0", s.anneal->beta0}, {"switch_iteration", s.anneal->switch_iteration}}
                         : nlohmann::json(nullptr);
  j["init"] = o.init.empty() ? default_init(s.kind) : o.init;
  j["checkpoint_every"] = o.checkpoint_every;
  j["snapshot_every"] = o.snapshot_every;
  j["kernel"] = o.kernel;
  j["bandwidth"] = o.bandwidth ? nlohmann::json(*o.bandwidth) : nlohmann::json(nullptr);
  j["imq_c"] = o.imq_c;
  j["imq_beta"] = o.imq_beta;
  j["reference_size"] = o.reference_size;
  j["grid"] = {{"lo", o.grid_lo}, {"hi", o.grid_hi}, {"n", o.grid_n}, {"modes", o.modes}};
  j["spectral_in"] = o.spectral_in;
  j["batch_size"] = o.batch_size;
  j["no_clock"] = o.no_clock;
  return j;
}

inline RunOptions options_from_json(const nlohmann::json& j) {
  try {
    RunOptions o;
    SamplerConfig& s = o.sampler;
    s.kind = parse_sampler(j.at("sampler").get<std::string>());
    o.target = j.at("target").get<std::string>();
    s.particles = j.at("particles").get<std::size_t>();
    s.iterations = j.at("iterations").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("learning_rate").is_null()) s.learning_rate = j["learning_rate"].get<double>();
    s.adagrad = j.at("adagrad").get<bool>();
    s.w0 = j.at("w0").get<double>();
    if (!j.at("L").is_null()) s.bound = j["L"].get<double>();
    if (!j.at("alpha_floor").is_null()) s.alpha = j["alpha_floor"].get<double>();
    if (!j.at("anneal").is_null())
      s.anneal = AnnealSchedule{j["anneal"].at("beta0").get<double>(),
                                j["anneal"].at("switch_iteration").get<std::size_t>()};
    o.init = j.at("init").get<std::string>();
    o.checkpoint_every = j.at("checkpoint_every").get<std::size_t>();
    o.snapshot_every = j.at("snapshot_every").get<std::size_t>();
    o.kernel = j.at("kernel").get<std::string>();
    if (!j.at("bandwidth").is_null()) o.bandwidth = j["bandwidth"].get<double>();
    o.imq_c = j.at("imq_c").get<double>();
    o.imq_beta = j.at("imq_beta").get<double>();
    o.reference_size = j.at("reference_size").get<std::size_t>();
    o.grid_lo = j.at("grid").at("lo").get<double>();
    o.grid_hi = j.at("grid").at("hi").get<double>();
    o.grid_n = j.at("grid").at("n").get<std::size_t>();
    o.modes = j.at("grid").at("modes").get<std::size_t>();
    o.spectral_in = j.at("spectral_in").get<std::string>();
    o.batch_size = j.at("batch_size").get<std::size_t>();
    o.no_clock = j.at("no_clock").get<bool>();
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("manifest config: ") + e.what());
  }
}

inline std::string snapshot_name(std::size_t t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.csv", t);
  return buf;
}

/// Runs one experiment. When `out` is non-empty, writes manifest.json,
/// metrics.csv, final.csv and any snapshots there.
inline RunRecord run_experiment(RunOptions o, const fs::path& out = {}) {
  apply_kernel_options(o);
  validate(o.sampler);
  const ResolvedTarget target = resolve_target(o.target, o.batch_size);
  const TargetModel& model = target.model;
  const std::size_t d = model.dim;
  const std::string init_spec = o.init.empty() ? default_init(o.sampler.kind) : o.init;
  const SamplerConfig& sc = o.sampler;
  const Matrix x0 = initial_positions(init_spec, sc.particles, d, sc.seed);

  std::optional<SpectralKernelTable> table;
  const bool lawgd = sc.kind == SamplerKind::Lawgd || sc.kind == SamplerKind::CoinLawgd;
  if (lawgd) {
    if (!o.spectral_in.empty()) {
      table = load_spectral(o.spectral_in);
    } else {
      if (!target.potential_grad) throw InvalidArgument("LAWGD needs a one-dimensional builtin target");
      table = build_spectral_kernel(target.potential_grad, o.grid_lo, o.grid_hi,
                                    static_cast<Eigen::Index>(o.grid_n), static_cast<Eigen::Index>(o.modes));
    }
  }

  std::optional<EnergyReference> reference;
  if (o.reference_size > 0 && model.sample) {
    Engine rng = make_engine(sc.seed, "reference");
    reference.emplace(model.sample(rng, o.reference_size), sc.threads);
  }
  const ImqKernel metric_kernel{o.imq_c, o.imq_beta};
  validate(KernelSpec{metric_kernel});

  RunRecord rec;
  rec.config = config_json(o);
  if (!out.empty()) fs::create_directories(out);
  std::optional<CsvWriter> metrics_csv;
  if (!out.empty()) {
    metrics_csv.emplace(out / "metrics.csv", kMetricsColumns);
    rec.files.push_back("metrics.csv");
  }

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  Clock::duration overhead{};
  auto evaluate = [&](std::size_t t, const Matrix& x) {
    const auto begin = Clock::now();
    const double elapsed =
        o.no_clock ? 0.0 : std::chrono::duration<double, std::milli>(begin - start - overhead).count();
    Checkpoint c;
    c.iteration = t;
    c.elapsed_ms = elapsed;
    Matrix s(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) s.row(i) = model.score(x.row(i).transpose()).transpose();
    c.ksd = ksd(x, s, metric_kernel, nullptr, sc.threads);
    c.energy_distance = reference ? (*reference)(x) : std::numeric_limits<double>::quiet_NaN();
    if (!rec.checkpoints.empty() && !o.no_clock)
      c.elapsed_ms = std::max(c.elapsed_ms, rec.checkpoints.back().elapsed_ms);
    rec.checkpoints.push_back(c);
    if (metrics_csv) {
      metrics_csv->write_row({std::to_string(t), format_double(c.ksd), format_double(c.energy_distance),
                              format_double(c.elapsed_ms)});
    }
    overhead += Clock::now() - begin;
  };

  CheckpointHook hook;
  hook.every = 1;
  hook.callback = [&](std::size_t t, const Matrix& x) {
    const bool final_iter = t == sc.iterations;
    const auto begin = Clock::now();
    if (!out.empty() && o.snapshot_every > 0 && t % o.snapshot_every == 0) {
      write_snapshot(out / snapshot_name(t), x);
      rec.files.push_back(snapshot_name(t));
    }
    overhead += Clock::now() - begin;
    if (t == 0 || final_iter || (o.checkpoint_every > 0 && t % o.checkpoint_every == 0)) evaluate(t, x);
  };

  SamplerResult res = run_sampler(sc, model, x0, hook, table ? &*table : nullptr);
  // A diverged run's last finite iteration may fall between checkpoints.
  if (rec.checkpoints.empty() || rec.checkpoints.back().iteration != res.ensemble.iteration)
    evaluate(res.ensemble.iteration, res.ensemble.positions);

  rec.final_positions = res.ensemble.positions;
  rec.status = res.status;
  rec.diagnostic = res.diagnostic;
  rec.clamped = res.clamped;
  if (!out.empty()) {
    metrics_csv->flush();
    write_snapshot(out / "final.csv", rec.final_positions);
    rec.files.push_back("final.csv");
    if (lawgd) {
      save_spectral(out / "spectral.json", *table);
      rec.files.push_back("spectral.json");
    }
    nlohmann::json m;
    m["version"] = kManifestVersion;
    m["config"] = rec.config;
    m["seed"] = sc.seed;
    m["status"] = std::string(to_string(rec.status));
    m["diagnostic"] = rec.diagnostic;
    m["clamped"] = rec.clamped;
    m["final_iteration"] = res.ensemble.iteration;
    m["files"] = rec.files;
    m["csv_schema"] = {{"version", kCsvSchemaVersion}, {"metrics", kMetricsColumns}};
    write_json(out / "manifest.json", m);
  }
  return rec;
}

/// Re-runs the configuration recorded in a manifest.
inline RunRecord rerun_manifest(const fs::path& manifest, const fs::path& out, std::size_t threads = 1) {
  const auto j = read_json(manifest);
  if (!j.contains("version") || j["version"].get<int>() != kManifestVersion)
    throw IoError(manifest.string() + ": unsupported manifest version");
  RunOptions o = options_from_json(j.at("config"));
  o.sampler.threads = threads;
  return run_experiment(o, out);
}

/// n log-spaced values from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo) || n == 0) throw InvalidArgument("learning-rate grid: need 0 < lo <= hi and n >= 1");
  if (n == 1) return {lo};
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t k = 0; k < n; ++k) g[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

struct SweepRow {
  double learning_rate = 0.0;
  RunStatus status = RunStatus::Completed;
  double final_ksd = 0.0;
  double final_energy_distance = 0.0;
  std::size_t iterations = 0;
};

/// Runs a baseline at every grid rate with the same seed. Coin samplers are
/// rejected: they have no learning rate to sweep.
inline std::vector<SweepRow> run_sweep(RunOptions o, const std::vector<double>& grid, const fs::path& out = {}) {
  if (is_coin(o.sampler.kind))
    throw InvalidArgument(std::string(to_string(o.sampler.kind)) +
                          " has no learning rate to sweep; sweeps apply to svgd, lawgd, ksdd and sgld");
  std::vector<SweepRow> rows;
  for (double lr : grid) {
    RunOptions r = o;
    r.sampler.learning_rate = lr;
    r.snapshot_every = 0;
    r.checkpoint_every = 0;
    const RunRecord rec = run_experiment(r);
    SweepRow row;
    row.learning_rate = lr;
    row.status = rec.status;
    row.final_ksd = rec.checkpoints.back().ksd;
    row.final_energy_distance = rec.checkpoints.back().energy_distance;
    row.iterations = rec.checkpoints.back().iteration;
    rows.push_back(row);
  }
  if (!out.empty()) {
    fs::create_directories(out);
    CsvWriter w(out / "sweep.csv", kSweepColumns);
    for (const auto& r : rows)
      w.write_row({format_double(r.learning_rate), std::string(to_string(r.status)), format_double(r.final_ksd),
                   format_double(r.final_energy_distance), std::to_string(r.iterations)});
    RunOptions cfg = o;
    cfg.sampler.learning_rate = grid.front();
    nlohmann::json m;
    m["version"] = kManifestVersion;
    m["config"] = config_json(cfg);
    m["config"]["learning_rate"] = nullptr;
    m["seed"] = o.sampler.seed;
    m["grid"] = grid;
    std::size_t diverged = 0;
    for (const auto& r : rows) diverged += r.status == RunStatus::Diverged ? 1 : 0;
    m["status"] = diverged == 0 ? "completed" : "completed_with_divergences";
    m["files"] = {"sweep.csv"};
    m["csv_schema"] = {{"version", kCsvSchemaVersion}, {"sweep", kSweepColumns}};
    write_json(out / "manifest.json", m);
  }
  return rows;
}

struct MetricsRequest {
  fs::path snapshot;
  fs::path reference;
  std::string target;
  fs::path truth;
  double imq_c = 1.0;
  double imq_beta = -0.5;
};

/// Metrics between a snapshot and a reference sample and/or a target.
/// ICA truth yields one Amari value per particle; logistic-regression
/// targets report test-split accuracy and NLL.
inline std::vector<MetricReport> compute_metrics(const MetricsRequest& req) {
  const Matrix x = read_snapshot(req.snapshot);
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<MetricReport> out;
  if (!req.reference.empty()) {
    const Matrix y = read_snapshot(req.reference);
    out.push_back({"energy_distance", energy_distance(x, y), n, {{"reference_size", static_cast<double>(y.rows())}}});
  }
  std::optional<Matrix> truth;
  if (!req.truth.empty()) truth = read_ica_truth(req.truth);
  if (!req.target.empty()) {
    const ResolvedTarget t = resolve_target(req.target);
    if (static_cast<std::size_t>(x.cols()) != t.model.dim)
      throw InvalidArgument("snapshot dimension does not match the target");
    bool clamped = false;
    const double v = ksd(x, t.model.score, req.imq_c, req.imq_beta, &clamped);
    out.push_back({"ksd", v, n, {{"imq_c", req.imq_c}, {"imq_beta", req.imq_beta}, {"clamped", clamped ? 1.0 : 0.0}}});
    if (!truth && t.w_true) truth = t.w_true;
    if (t.logreg) {
      const LogRegProblem test = logreg_problem(*t.logreg, Split::Test, 1);
      const LogRegMetrics m = logreg_metrics(x, test.features, test.labels);
      out.push_back({"test_accuracy", m.accuracy, n, {{"test_size", static_cast<double>(test.n())}}});
      out.push_back({"test_nll", m.nll, n, {{"test_size", static_cast<double>(test.n())}}});
    }
  }
  if (truth) {
    const Eigen::Index p = truth->rows();
    if (x.cols() != p * p) throw InvalidArgument("snapshot rows must hold p*p unmixing entries");
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      out.push_back({"amari_distance", amari_distance(unflatten_square(x.row(i).transpose(), p), *truth), 1,
                     {{"particle", static_cast<double>(i)}}});
  }
  if (x.rows() >= 2) {
    const Moments m = moments(x);
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.push_back({"mean", m.mean[j], n, {{"coordinate", static_cast<double>(j)}}});
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.push_back({"variance", m.covariance(j, j), n, {{"coordinate", static_cast<double>(j)}}});
  }
  return out;
}

inline nlohmann::json reports_json(const std::vector<MetricReport>& reports) {
  auto arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json p = nlohmann::json::object();
    for (const auto& [k, v] : r.params) p[k] = v;
    arr.push_back({{"name", r.name}, {"value", r.value}, {"n_samples", r.n_samples}, {"params", p}});
  }
  return arr;
}

}  // namespace coinsamp::harness
