// coinsamp-cli: run, sweep, gen and metrics subcommands.

#include <CLI11.hpp>
#include <iostream>

#include "coinsamp/harness/experiment.hpp"

namespace {

using namespace coinsamp;
using namespace coinsamp::harness;

struct CommonFlags {
  std::string sampler;
  std::string target = "gaussian2d";
  std::size_t particles = 20;
  std::size_t iters = 1000;
  std::uint64_t seed = 0;
  bool adagrad = false;
  double w0 = 1.0;
  std::optional<double> bound;
  double alpha_floor = 0.0;
  std::string anneal;
  std::string init;
  std::size_t checkpoint_every = 50;
  std::size_t snapshot_every = 0;
  std::string kernel = "rbf";
  std::optional<double> bandwidth;
  double imq_c = 1.0;
  double imq_beta = -0.5;
  std::size_t reference_size = 10000;
  double grid_lo = -10.0;
  double grid_hi = 10.0;
  std::size_t grid_n = 1000;
  std::size_t modes = 150;
  std::string spectral_in;
  std::size_t batch_size = 100;
  std::size_t threads = 1;
  bool no_clock = false;
  std::string out;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--sampler", f.sampler,
                  "svgd | coin-svgd | coin-svgd-plain | lawgd | coin-lawgd | ksdd | coin-ksdd | sgld");
  app->add_option("--target", f.target,
                  "gaussian2d | mog2 | donut | banana | squiggle | funnel | gauss1d | mog3 | gauss-exact | "
                  "ksdd-gauss | ksdd-mog | ksdd-mog-sym | ica:FILE | logreg:FILE")
      ->capture_default_str();
  app->add_option("--particles", f.particles, "Number of particles N")->capture_default_str();
  app->add_option("--iters", f.iters, "Number of iterations T")->capture_default_str();
  app->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  app->add_flag("--adagrad", f.adagrad, "Adagrad step scaling (svgd, lawgd, ksdd)");
  app->add_option("--w0", f.w0, "Initial wealth of the coin samplers")->capture_default_str();
  app->add_option("--L", f.bound, "Known gradient bound; selects the non-adaptive coin update");
  app->add_flag("--alpha-floor{100}", f.alpha_floor,
                "Floor the adaptive coin denominator at ALPHA * Lmax (default 100 when given bare)");
  app->add_option("--anneal", f.anneal, "BETA0:SWITCH_ITER two-stage tempering");
  app->add_option("--init", f.init, "normal:SD | uniform:LO:HI | file:PATH (default depends on the sampler)");
  app->add_option("--checkpoint-every", f.checkpoint_every, "Metric checkpoint cadence")->capture_default_str();
  app->add_option("--snapshot-every", f.snapshot_every, "Particle snapshot cadence (0: final only)")
      ->capture_default_str();
  app->add_option("--kernel", f.kernel, "Sampler kernel: rbf | imq")->capture_default_str();
  app->add_option("--bandwidth", f.bandwidth, "Fixed RBF bandwidth (default: median heuristic)");
  app->add_option("--imq-c", f.imq_c, "IMQ c (KSD metric and --kernel imq)")->capture_default_str();
  app->add_option("--imq-beta", f.imq_beta, "IMQ beta (KSD metric and --kernel imq)")->capture_default_str();
  app->add_option("--reference-size", f.reference_size, "Target draws for the energy distance (0: off)")
      ->capture_default_str();
  app->add_option("--grid-lo", f.grid_lo, "LAWGD grid lower end")->capture_default_str();
  app->add_option("--grid-hi", f.grid_hi, "LAWGD grid upper end")->capture_default_str();
  app->add_option("--grid-n", f.grid_n, "LAWGD grid nodes")->capture_default_str();
  app->add_option("--modes", f.modes, "LAWGD retained eigenpairs")->capture_default_str();
  app->add_option("--spectral-in", f.spectral_in, "Load a saved spectral table instead of building one");
  app->add_option("--batch-size", f.batch_size, "Minibatch size for logreg targets")->capture_default_str();
  app->add_option("--threads", f.threads, "Worker threads (results do not depend on it)")->capture_default_str();
  app->add_flag("--no-clock", f.no_clock, "Record elapsed_ms as 0 for byte-identical reruns");
  app->add_option("--out", f.out, "Output directory")->required();
}

RunOptions to_options(const CommonFlags& f, std::optional<double> lr) {
  if (f.sampler.empty()) throw InvalidArgument("--sampler is required");
  RunOptions o;
  SamplerConfig& s = o.sampler;
  s.kind = parse_sampler(f.sampler);
  s.particles = f.particles;
  s.iterations = f.iters;
  s.seed = f.seed;
  s.learning_rate = lr;
  s.adagrad = f.adagrad;
  s.w0 = f.w0;
  s.bound = f.bound;
  if (f.alpha_floor != 0.0) s.alpha = f.alpha_floor;
  if (!f.anneal.empty()) {
    const auto k = f.anneal.find(':');
    if (k == std::string::npos) throw InvalidArgument("--anneal expects BETA0:SWITCH_ITER");
    AnnealSchedule a;
    a.beta0 = parse_double(f.anneal.substr(0, k), "--anneal");
    const double sw = parse_double(f.anneal.substr(k + 1), "--anneal");
    if (!(sw >= 0.0) || sw != std::floor(sw)) throw InvalidArgument("--anneal switch iteration must be an integer");
    a.switch_iteration = static_cast<std::size_t>(sw);
    s.anneal = a;
  }
  s.threads = f.threads;
  o.target = f.target;
  o.init = f.init;
  o.checkpoint_every = f.checkpoint_every;
  o.snapshot_every = f.snapshot_every;
  o.kernel = f.kernel;
  o.bandwidth = f.bandwidth;
  o.imq_c = f.imq_c;
  o.imq_beta = f.imq_beta;
  o.reference_size = f.reference_size;
  o.grid_lo = f.grid_lo;
  o.grid_hi = f.grid_hi;
  o.grid_n = f.grid_n;
  o.modes = f.modes;
  o.spectral_in = f.spectral_in;
  o.batch_size = f.batch_size;
  o.no_clock = f.no_clock;
  return o;
}

void print_run(const RunRecord& r, const std::string& out) {
  std::cout << "status=" << to_string(r.status) << " final_iteration=" << r.checkpoints.back().iteration
            << " ksd=" << format_double(r.checkpoints.back().ksd)
            << " energy_distance=" << format_double(r.checkpoints.back().energy_distance);
  if (r.clamped > 0) std::cout << " clamped=" << r.clamped;
  std::cout << " out=" << out << "\n";
  if (r.status == RunStatus::Diverged) std::cout << "diagnostic: " << r.diagnostic << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning-rate-free particle samplers"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::optional<double> run_lr;
  std::string manifest;
  auto* run = app.add_subcommand("run", "Run one sampler and write manifest, metrics and snapshots");
  add_common(run, run_flags);
  run->add_option("--lr", run_lr, "Learning rate (baselines only)");
  run->add_option("--manifest", manifest, "Re-run the configuration recorded in a manifest");

  CommonFlags sweep_flags;
  double lr_min = 1e-5, lr_max = 1e1;
  std::size_t lr_count = 30;
  auto* sweep = app.add_subcommand("sweep", "Sweep a log-spaced learning-rate grid for a baseline");
  add_common(sweep, sweep_flags);
  sweep->add_option("--lr-min", lr_min, "Smallest rate")->capture_default_str();
  sweep->add_option("--lr-max", lr_max, "Largest rate")->capture_default_str();
  sweep->add_option("--lr-count", lr_count, "Grid size")->capture_default_str();

  std::string family;
  Eigen::Index gen_p = 2, gen_n = 1000;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset (ica | logreg)");
  gen->add_option("family", family, "ica | logreg")->required()->check(CLI::IsMember({"ica", "logreg"}));
  gen->add_option("--p", gen_p, "Dimension")->capture_default_str();
  gen->add_option("--n", gen_n, "Number of observations")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();

  MetricsRequest mreq;
  std::string snapshot, reference, truth, metrics_out;
  auto* metrics = app.add_subcommand("metrics", "Compute metrics for a particle snapshot");
  metrics->add_option("--snapshot", snapshot, "Snapshot CSV")->required();
  metrics->add_option("--reference", reference, "Reference sample CSV (energy distance)");
  metrics->add_option("--target", mreq.target, "Analytic target (KSD; logreg:FILE adds test metrics)");
  metrics->add_option("--truth", truth, "ICA truth.json (one Amari distance per particle)");
  metrics->add_option("--imq-c", mreq.imq_c, "IMQ c")->capture_default_str();
  metrics->add_option("--imq-beta", mreq.imq_beta, "IMQ beta")->capture_default_str();
  metrics->add_option("--out", metrics_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      RunRecord rec = manifest.empty() ? run_experiment(to_options(run_flags, run_lr), run_flags.out)
                                       : rerun_manifest(manifest, run_flags.out, run_flags.threads);
      print_run(rec, run_flags.out);
    } else if (*sweep) {
      const auto grid = log_grid(lr_min, lr_max, lr_count);
      RunOptions o = to_options(sweep_flags, std::nullopt);
      if (is_coin(o.sampler.kind)) {
        std::cerr << "error: " << to_string(o.sampler.kind)
                  << " is learning-rate free; there is nothing to sweep (use svgd, lawgd, ksdd or sgld)\n";
        return 2;
      }
      const auto rows = run_sweep(o, grid, sweep_flags.out);
      std::size_t best = rows.size();
      for (std::size_t k = 0; k < rows.size(); ++k)
        if (rows[k].status == RunStatus::Completed && std::isfinite(rows[k].final_ksd) &&
            (best == rows.size() || rows[k].final_ksd < rows[best].final_ksd))
          best = k;
      std::cout << "rates=" << rows.size();
      if (best < rows.size())
        std::cout << " best_lr=" << format_double(rows[best].learning_rate)
                  << " best_ksd=" << format_double(rows[best].final_ksd);
      std::cout << " out=" << sweep_flags.out << "\n";
    } else if (*gen) {
      fs::path data;
      if (family == "ica") data = write_ica(gen_out, ica_generate(gen_p, gen_n, gen_seed));
      else data = write_logreg(gen_out, logreg_generate(gen_n, gen_p, gen_seed));
      std::cout << "wrote " << data.string() << " and " << (fs::path(gen_out) / "truth.json").string() << "\n";
    } else if (*metrics) {
      mreq.snapshot = snapshot;
      mreq.reference = reference;
      mreq.truth = truth;
      const auto reports = compute_metrics(mreq);
      fs::create_directories(metrics_out);
      write_json(fs::path(metrics_out) / "metrics.json", {{"version", kManifestVersion},
                                                          {"snapshot", snapshot},
                                                          {"metrics", reports_json(reports)}});
      for (const auto& r : reports) std::cout << r.name << "=" << format_double(r.value) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
