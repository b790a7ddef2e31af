#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "coinsamp/coin.hpp"
#include "coinsamp/kernels.hpp"
#include "coinsamp/parallel.hpp"
#include "coinsamp/rng.hpp"
#include "coinsamp/spectral.hpp"
#include "coinsamp/stein.hpp"
#include "coinsamp/targets.hpp"

namespace coinsamp {

enum class SamplerKind { Svgd, CoinSvgd, CoinSvgdPlain, Lawgd, CoinLawgd, Ksdd, CoinKsdd, Sgld };

inline std::string_view to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::Svgd: return "svgd";
    case SamplerKind::CoinSvgd: return "coin-svgd";
    case SamplerKind::CoinSvgdPlain: return "coin-svgd-plain";
    case SamplerKind::Lawgd: return "lawgd";
    case SamplerKind::CoinLawgd: return "coin-lawgd";
    case SamplerKind::Ksdd: return "ksdd";
    case SamplerKind::CoinKsdd: return "coin-ksdd";
    case SamplerKind::Sgld: return "sgld";
  }
  return "?";
}

inline SamplerKind parse_sampler(std::string_view s) {
  for (auto k : {SamplerKind::Svgd, SamplerKind::CoinSvgd, SamplerKind::CoinSvgdPlain, SamplerKind::Lawgd,
                 SamplerKind::CoinLawgd, SamplerKind::Ksdd, SamplerKind::CoinKsdd, SamplerKind::Sgld})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown sampler '" + std::string(s) + "'");
}

inline bool is_coin(SamplerKind k) {
  return k == SamplerKind::CoinSvgd || k == SamplerKind::CoinSvgdPlain || k == SamplerKind::CoinLawgd ||
         k == SamplerKind::CoinKsdd;
}

struct AnnealSchedule {
  double beta0 = 0.02;
  /// Iterations run on pi_beta0 before switching to pi.
  std::size_t switch_iteration = 0;
};

struct SamplerConfig {
  SamplerKind kind = SamplerKind::CoinSvgd;
  std::size_t particles = 20;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  /// Step size for the baselines; coin samplers reject it.
  std::optional<double> learning_rate;
  bool adagrad = false;
  double w0 = 1.0;
  /// Known gradient bound L; selects the non-adaptive coin update.
  std::optional<double> bound;
  /// Denominator floor of the adaptive coin update.
  std::optional<double> alpha;
  std::optional<AnnealSchedule> anneal;
  /// Kernel for SVGD and the KSDD base kernel; unset means RBF with the
  /// median bandwidth of the current positions.
  std::optional<KernelSpec> kernel;
  /// Per-particle noise seeds for SGLD; derived from `seed` when empty.
  std::vector<std::uint64_t> particle_seeds;
  std::size_t threads = 1;
};

/// Throws InvalidArgument for inconsistent settings.
inline void validate(const SamplerConfig& c) {
  detail::require(c.particles >= 1, "config: need at least one particle");
  detail::require(c.threads >= 1, "config: threads must be >= 1");
  if (is_coin(c.kind)) {
    detail::require(!c.learning_rate.has_value(),
                    std::string(to_string(c.kind)) + " is learning-rate free; do not pass a learning rate");
    detail::require(!c.adagrad, std::string(to_string(c.kind)) + " does not use Adagrad");
    detail::require(c.w0 > 0.0 && std::isfinite(c.w0), "config: w0 must be positive");
    if (c.kind == SamplerKind::CoinSvgdPlain)
      detail::require(c.bound.has_value(), "coin-svgd-plain requires a gradient bound L");
    if (c.bound) detail::require(*c.bound > 0.0 && std::isfinite(*c.bound), "config: L must be positive");
    if (c.alpha) detail::require(*c.alpha >= 1.0, "config: alpha must be >= 1");
  } else {
    detail::require(c.learning_rate.has_value(), std::string(to_string(c.kind)) + " requires a learning rate");
    detail::require(*c.learning_rate >= 0.0 && std::isfinite(*c.learning_rate),
                    "config: learning rate must be nonnegative");
    detail::require(!c.bound && !c.alpha, "config: L and alpha only apply to coin samplers");
  }
  if (c.anneal) {
    detail::require(c.kind != SamplerKind::Lawgd && c.kind != SamplerKind::CoinLawgd,
                    "config: annealing is not available for LAWGD");
    detail::require(c.anneal->beta0 > 0.0 && c.anneal->beta0 <= 1.0, "config: anneal beta0 must lie in (0, 1]");
    detail::require(c.anneal->switch_iteration <= c.iterations, "config: anneal switch beyond the last iteration");
  }
  if (!c.particle_seeds.empty())
    detail::require(c.particle_seeds.size() == c.particles, "config: one particle seed per particle");
  if (c.kernel) validate(*c.kernel);
}

/// N x d particle positions plus the iteration that produced them.
struct ParticleEnsemble {
  Matrix positions;
  std::size_t iteration = 0;
};

enum class RunStatus { Completed, Diverged };

inline std::string_view to_string(RunStatus s) { return s == RunStatus::Completed ? "completed" : "diverged"; }

struct SamplerResult {
  ParticleEnsemble ensemble;
  RunStatus status = RunStatus::Completed;
  std::string diagnostic;
  /// LAWGD evaluations that fell outside the spectral grid.
  std::size_t clamped = 0;
};

/// Called with iteration 0, every `every` iterations, and the last iteration.
struct CheckpointHook {
  std::size_t every = 0;
  std::function<void(std::size_t, const Matrix&)> callback;
};

// ---------------------------------------------------------------------------
// Directions. Each returns the N x d estimate of the Wasserstein gradient
// that a descent step moves against. Sums over particles run in
// lexicographic order of position, so relabelling the particles permutes the
// output exactly.

namespace detail {

inline std::vector<Eigen::Index> summation_order(const Eigen::Ref<const Matrix>& positions) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(positions.rows()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < positions.cols(); ++c)
      if (positions(a, c) != positions(b, c)) return positions(a, c) < positions(b, c);
    return false;
  });
  return order;
}

}  // namespace detail

/// Kernelized KL gradient
///   row i = (1/N) sum_j [k(x_j, x_i) (-s(x_j)) - grad_1 k(x_j, x_i)].
inline Matrix svgd_direction(const Eigen::Ref<const Matrix>& positions, const Eigen::Ref<const Matrix>& scores,
                             const KernelSpec& kernel, std::size_t threads = 1) {
  detail::require(positions.rows() == scores.rows() && positions.cols() == scores.cols(),
                  "svgd_direction: positions and scores differ in shape");
  validate(kernel);
  const Eigen::Index n = positions.rows();
  const auto order = detail::summation_order(positions);
  Matrix out(n, positions.cols());
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    Vector acc = Vector::Zero(positions.cols());
    for (const Eigen::Index j : order) {
      const Vector z = positions.row(j) - positions.row(i);
      const auto p = profile(kernel, z.squaredNorm());
      acc -= p.phi * scores.row(j).transpose();
      acc -= 2.0 * p.d1 * z;
    }
    out.row(i) = acc.transpose() / static_cast<double>(n);
  });
  return out;
}

/// row i = (1/N) sum_j d k_L(x_i, x_j) / dx_i, for 1-D particles.
inline Matrix lawgd_direction(const Eigen::Ref<const Matrix>& positions, const SpectralKernelTable& table,
                              std::size_t* clamped = nullptr) {
  detail::require(positions.cols() == 1, "lawgd_direction: LAWGD is one-dimensional");
  const Eigen::Index n = positions.rows();
  // sum_j k_L'(x_i, x_j) = sum_k phi_k'(x_i) / lambda_k * sum_j phi_k(x_j)
  Vector mode_sums = Vector::Zero(table.modes());
  for (const Eigen::Index j : detail::summation_order(positions))
    mode_sums += table.modes_at(positions(j, 0), clamped);
  mode_sums = mode_sums.cwiseProduct(table.inverse_eigenvalues());
  Matrix out(n, 1);
  for (Eigen::Index i = 0; i < n; ++i)
    out(i, 0) = table.mode_slopes_at(positions(i, 0), clamped).dot(mode_sums) / static_cast<double>(n);
  return out;
}

/// Gradient of KSD^2 / 2: row i = (1/N^2) sum_j grad_2 k_pi(x_j, x_i).
inline Matrix ksdd_direction(const Eigen::Ref<const Matrix>& positions, const Eigen::Ref<const Matrix>& scores,
                             const std::vector<Matrix>& score_jacobians, const KernelSpec& base,
                             std::size_t threads = 1) {
  const Eigen::Index n = positions.rows();
  detail::require(scores.rows() == n && static_cast<Eigen::Index>(score_jacobians.size()) == n,
                  "ksdd_direction: inputs differ in particle count");
  validate(base);
  Matrix out(n, positions.cols());
  const double inv_n2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  const auto order = detail::summation_order(positions);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    Vector acc = Vector::Zero(positions.cols());
    const Vector xi = positions.row(i).transpose();
    const Vector si = scores.row(i).transpose();
    for (const Eigen::Index j : order) {
      acc += stein_kernel_terms(positions.row(j).transpose(), xi, scores.row(j).transpose(), si, base,
                                &score_jacobians[ii])
                 .grad2;
    }
    out.row(i) = inv_n2 * acc.transpose();
  });
  return out;
}

/// Mean trajectory m_1..m_T of coin Wasserstein gradient descent between
/// equal-covariance Gaussians, from the closed-form gradient S^{-1}(m_s - m_pi):
///   m_t = m0 - [sum_{s<t} g_s] / (L t) * (w0 - sum_{s<t} <g_s / L, m_s - m0>).
inline std::vector<Vector> mean_flow_oracle(const Vector& m0, const Vector& m_pi, const Matrix& sigma_inv,
                                            double bound, double w0, std::size_t iterations) {
  detail::require(bound > 0.0 && w0 > 0.0, "mean_flow_oracle: L and w0 must be positive");
  detail::require(m0.size() == m_pi.size() && sigma_inv.rows() == m0.size(), "mean_flow_oracle: dimension mismatch");
  detail::spd_cholesky(sigma_inv, "mean_flow_oracle");
  std::vector<Vector> traj;
  traj.reserve(iterations);
  std::vector<Vector> grads;
  for (std::size_t t = 1; t <= iterations; ++t) {
    Vector g_sum = Vector::Zero(m0.size());
    double payoff = 0.0;
    for (std::size_t s = 0; s + 1 < t; ++s) {
      g_sum += grads[s];
      payoff += grads[s].dot(traj[s] - m0) / bound;
    }
    traj.push_back(m0 - g_sum / (bound * static_cast<double>(t)) * (w0 - payoff));
    grads.push_back(sigma_inv * (traj.back() - m_pi));
  }
  return traj;
}

namespace detail {

inline Matrix evaluate_scores(const TargetModel& target, const Matrix& positions, std::uint64_t batch_seed,
                              std::size_t threads) {
  Matrix s(positions.rows(), positions.cols());
  parallel_for(static_cast<std::size_t>(positions.rows()), threads, [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    const Vector x = positions.row(i).transpose();
    const Vector v = target.stochastic() ? target.stochastic_score(x, batch_seed) : target.score(x);
    require(v.size() == positions.cols(), "target score has the wrong dimension");
    s.row(i) = v.transpose();
  });
  return s;
}

/// Moves particles given the direction for the current iteration.
class Updater {
 public:
  virtual ~Updater() = default;
  /// `direction` is evaluated lazily: plain coin rounds start with no gradient.
  virtual Matrix advance(const Matrix& positions, const std::function<Matrix()>& direction) = 0;
};

class DescentUpdater final : public Updater {
 public:
  DescentUpdater(double lr, bool adagrad) : lr_(lr), adagrad_(adagrad) {}

  Matrix advance(const Matrix& positions, const std::function<Matrix()>& direction) override {
    const Matrix g = direction();
    if (!adagrad_) return positions - lr_ * g;
    if (!started_) {
      acc_ = g.array().square().matrix();
      started_ = true;
    } else {
      acc_ = 0.9 * acc_ + 0.1 * g.array().square().matrix();
    }
    return positions - lr_ * (g.array() / (1e-6 + acc_.array().sqrt())).matrix();
  }

 private:
  double lr_;
  bool adagrad_;
  bool started_ = false;
  Matrix acc_;
};

class AdaptiveCoinUpdater final : public Updater {
 public:
  AdaptiveCoinUpdater(const Matrix& origin, std::optional<double> alpha, std::size_t threads) : threads_(threads) {
    for (Eigen::Index i = 0; i < origin.rows(); ++i) coins_.emplace_back(origin.row(i).transpose(), alpha);
  }

  Matrix advance(const Matrix& positions, const std::function<Matrix()>& direction) override {
    const Matrix g = direction();
    Matrix out(positions.rows(), positions.cols());
    parallel_for(coins_.size(), threads_, [&](std::size_t i) {
      const auto r = static_cast<Eigen::Index>(i);
      out.row(r) = coins_[i].step(g.row(r).transpose()).transpose();
    });
    return out;
  }

 private:
  std::vector<AdaptiveCoin> coins_;
  std::size_t threads_;
};

class PlainCoinUpdater final : public Updater {
 public:
  PlainCoinUpdater(const Matrix& origin, double bound, double w0, std::size_t threads) : threads_(threads) {
    for (Eigen::Index i = 0; i < origin.rows(); ++i) coins_.emplace_back(origin.row(i).transpose(), bound, w0);
  }

  Matrix advance(const Matrix& positions, const std::function<Matrix()>& direction) override {
    Matrix out(positions.rows(), positions.cols());
    if (first_) {
      // Round 1 bets the origin; no gradient has been observed yet.
      first_ = false;
      for (std::size_t i = 0; i < coins_.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = coins_[i].position().transpose();
      return out;
    }
    const Matrix g = direction();
    parallel_for(coins_.size(), threads_, [&](std::size_t i) {
      const auto r = static_cast<Eigen::Index>(i);
      out.row(r) = coins_[i].step(g.row(r).transpose()).transpose();
    });
    return out;
  }

 private:
  std::vector<CoinWgd> coins_;
  std::size_t threads_;
  bool first_ = true;
};

/// x <- x - (lr / 2) g + sqrt(lr) xi with g = -score; one noise stream per particle.
class LangevinUpdater final : public Updater {
 public:
  LangevinUpdater(double lr, const std::vector<std::uint64_t>& seeds) : lr_(lr) {
    for (auto s : seeds) engines_.emplace_back(s);
  }

  Matrix advance(const Matrix& positions, const std::function<Matrix()>& direction) override {
    const Matrix g = direction();
    Matrix out = positions - 0.5 * lr_ * g;
    const double sd = std::sqrt(lr_);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      std::normal_distribution<double> n01(0.0, 1.0);
      auto& rng = engines_[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) += sd * n01(rng);
    }
    return out;
  }

 private:
  double lr_;
  std::vector<Engine> engines_;
};

using DirectionField = std::function<Matrix(const TargetModel&, const Matrix&, std::size_t)>;

inline std::unique_ptr<Updater> make_updater(const SamplerConfig& c, const Matrix& origin) {
  switch (c.kind) {
    case SamplerKind::Sgld: {
      std::vector<std::uint64_t> seeds = c.particle_seeds;
      if (seeds.empty())
        for (std::size_t i = 0; i < c.particles; ++i) seeds.push_back(substream_seed(c.seed, "noise", i));
      return std::make_unique<LangevinUpdater>(*c.learning_rate, seeds);
    }
    case SamplerKind::Svgd:
    case SamplerKind::Lawgd:
    case SamplerKind::Ksdd:
      return std::make_unique<DescentUpdater>(*c.learning_rate, c.adagrad);
    default:
      if (c.bound) return std::make_unique<PlainCoinUpdater>(origin, *c.bound, c.w0, c.threads);
      return std::make_unique<AdaptiveCoinUpdater>(origin, c.alpha, c.threads);
  }
}

inline SamplerResult iterate(const SamplerConfig& config, const TargetModel& target, const Matrix& initial,
                             const DirectionField& field, const CheckpointHook& hook) {
  validate(config);
  require(initial.rows() == static_cast<Eigen::Index>(config.particles), "initial positions: wrong particle count");
  require(initial.cols() == static_cast<Eigen::Index>(target.dim), "initial positions: wrong dimension");
  require(initial.allFinite(), "initial positions: non-finite entries");

  SamplerResult res;
  Matrix x = initial;
  std::optional<TargetModel> tempered;
  if (config.anneal && config.anneal->switch_iteration > 0) tempered = anneal(target, config.anneal->beta0);
  auto updater = make_updater(config, x);
  auto notify = [&](std::size_t t) {
    if (hook.callback) hook.callback(t, x);
  };
  notify(0);
  std::size_t last_notified = 0;
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const bool stage_one = tempered && t <= config.anneal->switch_iteration;
    if (tempered && t == config.anneal->switch_iteration + 1) updater = make_updater(config, x);
    const TargetModel& current = stage_one ? *tempered : target;
    Matrix next;
    try {
      next = updater->advance(x, [&] { return field(current, x, t); });
    } catch (const SingularMatrix& e) {
      res.status = RunStatus::Diverged;
      res.diagnostic = "iteration " + std::to_string(t) + ": " + e.what();
      break;
    } catch (const InvalidArgument& e) {
      // Non-finite gradients surface here from the coin states.
      if (!x.allFinite()) throw;
      res.status = RunStatus::Diverged;
      res.diagnostic = "iteration " + std::to_string(t) + ": " + e.what();
      break;
    }
    if (!next.allFinite()) {
      res.status = RunStatus::Diverged;
      res.diagnostic = "iteration " + std::to_string(t) + ": non-finite particle positions";
      break;
    }
    x = std::move(next);
    res.ensemble.iteration = t;
    if (hook.every > 0 && t % hook.every == 0) {
      notify(t);
      last_notified = t;
    }
  }
  if (res.ensemble.iteration != last_notified) notify(res.ensemble.iteration);
  res.ensemble.positions = std::move(x);
  return res;
}

inline KernelSpec resolve_kernel(const SamplerConfig& c, const Matrix& x) {
  return c.kernel ? *c.kernel : KernelSpec{RbfKernel{median_bandwidth_or_unit(x)}};
}

inline DirectionField svgd_field(const SamplerConfig& c) {
  return [c](const TargetModel& target, const Matrix& x, std::size_t t) -> Matrix {
    if (target.exact_direction) return target.exact_direction(x);
    const Matrix s = evaluate_scores(target, x, substream_seed(c.seed, "batches", t), c.threads);
    return svgd_direction(x, s, resolve_kernel(c, x), c.threads);
  };
}

inline DirectionField ksdd_field(const SamplerConfig& c) {
  return [c](const TargetModel& target, const Matrix& x, std::size_t) -> Matrix {
    require(!target.stochastic(), "KSDD needs an exact score");
    const Matrix s = evaluate_scores(target, x, 0, c.threads);
    std::vector<Matrix> jac(static_cast<std::size_t>(x.rows()));
    parallel_for(jac.size(), c.threads, [&](std::size_t i) {
      jac[i] = score_jacobian(target, x.row(static_cast<Eigen::Index>(i)).transpose());
    });
    return ksdd_direction(x, s, jac, resolve_kernel(c, x), c.threads);
  };
}

inline DirectionField sgld_field(const SamplerConfig& c) {
  return [c](const TargetModel& target, const Matrix& x, std::size_t t) -> Matrix {
    return -evaluate_scores(target, x, substream_seed(c.seed, "batches", t), c.threads);
  };
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Runs. All particles move simultaneously: iteration t reads only the
// positions of iteration t - 1.

inline SamplerResult svgd_run(const SamplerConfig& c, const TargetModel& target, const Matrix& initial,
                              const CheckpointHook& hook = {}) {
  detail::require(c.kind == SamplerKind::Svgd, "svgd_run: config is not svgd");
  return detail::iterate(c, target, initial, detail::svgd_field(c), hook);
}

/// Coin SVGD. Adaptive per-coordinate bounds unless `c.bound` is set.
inline SamplerResult coin_svgd_run(const SamplerConfig& c, const TargetModel& target, const Matrix& initial,
                                   const CheckpointHook& hook = {}) {
  detail::require(c.kind == SamplerKind::CoinSvgd || c.kind == SamplerKind::CoinSvgdPlain,
                  "coin_svgd_run: config is not coin-svgd");
  return detail::iterate(c, target, initial, detail::svgd_field(c), hook);
}

inline SamplerResult lawgd_run(const SamplerConfig& c, const TargetModel& target, const SpectralKernelTable& table,
                               const Matrix& initial, const CheckpointHook& hook = {}) {
  detail::require(c.kind == SamplerKind::Lawgd || c.kind == SamplerKind::CoinLawgd,
                  "lawgd_run: config is not lawgd / coin-lawgd");
  detail::require(target.dim == 1, "lawgd_run: LAWGD needs a one-dimensional target");
  std::size_t clamped = 0;
  auto field = [&table, &clamped](const TargetModel&, const Matrix& x, std::size_t) -> Matrix {
    return lawgd_direction(x, table, &clamped);
  };
  SamplerResult r = detail::iterate(c, target, initial, field, hook);
  r.clamped = clamped;
  return r;
}

inline SamplerResult coin_lawgd_run(const SamplerConfig& c, const TargetModel& target,
                                    const SpectralKernelTable& table, const Matrix& initial,
                                    const CheckpointHook& hook = {}) {
  detail::require(c.kind == SamplerKind::CoinLawgd, "coin_lawgd_run: config is not coin-lawgd");
  return lawgd_run(c, target, table, initial, hook);
}

inline SamplerResult ksdd_run(const SamplerConfig& c, const TargetModel& target, const Matrix& initial,
                              const CheckpointHook& hook = {}) {
  detail::require(c.kind == SamplerKind::Ksdd || c.kind == SamplerKind::CoinKsdd,
                  "ksdd_run: config is not ksdd / coin-ksdd");
  return detail::iterate(c, target, initial, detail::ksdd_field(c), hook);
}

inline SamplerResult coin_ksdd_run(const SamplerConfig& c, const TargetModel& target, const Matrix& initial,
                                   const CheckpointHook& hook = {}) {
  detail::require(c.kind == SamplerKind::CoinKsdd, "coin_ksdd_run: config is not coin-ksdd");
  return ksdd_run(c, target, initial, hook);
}

inline SamplerResult sgld_run(const SamplerConfig& c, const TargetModel& target, const Matrix& initial,
                              const CheckpointHook& hook = {}) {
  detail::require(c.kind == SamplerKind::Sgld, "sgld_run: config is not sgld");
  return detail::iterate(c, target, initial, detail::sgld_field(c), hook);
}

/// Dispatches on `c.kind`; LAWGD variants need `table`.
inline SamplerResult run_sampler(const SamplerConfig& c, const TargetModel& target, const Matrix& initial,
                                 const CheckpointHook& hook = {}, const SpectralKernelTable* table = nullptr) {
  switch (c.kind) {
    case SamplerKind::Svgd: return svgd_run(c, target, initial, hook);
    case SamplerKind::CoinSvgd:
    case SamplerKind::CoinSvgdPlain: return coin_svgd_run(c, target, initial, hook);
    case SamplerKind::Lawgd:
    case SamplerKind::CoinLawgd:
      detail::require(table != nullptr, "run_sampler: LAWGD needs a spectral table");
      return lawgd_run(c, target, *table, initial, hook);
    case SamplerKind::Ksdd:
    case SamplerKind::CoinKsdd: return ksdd_run(c, target, initial, hook);
    case SamplerKind::Sgld: return sgld_run(c, target, initial, hook);
  }
  throw InvalidArgument("run_sampler: unknown sampler");
}

}  // namespace coinsamp
