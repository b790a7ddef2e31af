// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "coinsamp/harness/experiment.hpp"
#include "coinsamp/ica.hpp"
#include "coinsamp/logreg.hpp"
#include "coinsamp/metrics.hpp"
#include "coinsamp/samplers.hpp"
#include "oracles.hpp"

using namespace coinsamp;

namespace {

// Tolerances.
constexpr double kC1Tol = 0.5;
constexpr double kC1Seconds = 1.0;
constexpr double kC2Equiv = 1e-10;
constexpr double kC2Contraction = 0.05;
constexpr double kC3Ratio = 0.25;
constexpr double kC3Seconds = 60.0;
constexpr double kC4Factor = 3.0;
constexpr double kC5Rel = 1e-6;
constexpr double kC6Rel = 1e-5;
constexpr double kC7Rel = 0.02;
constexpr double kC8Mean = 0.15;
constexpr double kC8VarRel = 0.20;
constexpr double kC9Ratio = 0.20;
constexpr double kC10Trap = 0.10;
constexpr double kC10Mode = 0.25;
constexpr double kC11Amari = 1e-12;

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix normal_matrix(Engine& e, Eigen::Index n, Eigen::Index d, double sd) {
  std::normal_distribution<double> g(0.0, sd);
  Matrix x(n, d);
  for (Eigen::Index k = 0; k < n * d; ++k) x.data()[k] = g(e);
  return x;
}

Matrix init_normal(std::uint64_t seed, Eigen::Index n, Eigen::Index d, double sd) {
  Engine e = make_engine(seed, "init");
  return normal_matrix(e, n, d, sd);
}

Matrix permute_rows(const Matrix& x, const std::vector<Eigen::Index>& p) {
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) y.row(i) = x.row(p[static_cast<std::size_t>(i)]);
  return y;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1. KT bettor on |x - 10|.
Outcome c1() {
  const auto t0 = Clock::now();
  const std::size_t T = 50000;
  KTBettor bettor(1, 1.0);
  double sum = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    const double x = bettor.bet()[0];
    sum += x;
    const double g = x > 10.0 ? 1.0 : (x < 10.0 ? -1.0 : 0.0);
    bettor.step(Vector::Constant(1, g));
  }
  const double xbar = sum / static_cast<double>(T);
  const double secs = seconds_since(t0);
  return {std::abs(xbar - 10.0) <= kC1Tol && secs < kC1Seconds,
          fmt("mean iterate %.4f (|err| <= %.2f), %.4f s (< %.0f s)", xbar, kC1Tol, secs, kC1Seconds)};
}

// 2. Coin WGD under the exact Gaussian gradient versus the mean recursion.
Outcome c2() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n01;
  double worst_equiv = 0.0, worst_ratio = 0.0;
  int draws = 0, contracted = 0;
  std::string per_dim;
  for (int d = 1; d <= 5; ++d) {
    double dim_worst = 0.0;
    for (int rep = 0; rep < 4; ++rep, ++draws) {
      Matrix a(d, d);
      for (int k = 0; k < d * d; ++k) a.data()[k] = n01(rng);
      const Matrix sigma_inv = a * a.transpose() + 0.5 * Matrix::Identity(d, d);
      Vector m_pi(d);
      for (int j = 0; j < d; ++j) m_pi[j] = 2.0 * n01(rng);
      Matrix x0(6, d);
      for (int k = 0; k < 6 * d; ++k) x0.data()[k] = n01(rng);
      const Vector m0 = x0.colwise().mean().transpose();
      const double bound = 2.0 * (sigma_inv * (m0 - m_pi)).norm();

      const auto traj = mean_flow_oracle(m0, m_pi, sigma_inv, bound, 1.0, 200);
      std::vector<Matrix> seen;
      SamplerConfig c;
      c.kind = SamplerKind::CoinSvgdPlain;
      c.particles = 6;
      c.iterations = 200;
      c.bound = bound;
      coin_svgd_run(c, gaussian_exact(m_pi, sigma_inv), x0, {1, [&](std::size_t, const Matrix& y) { seen.push_back(y); }});
      for (std::size_t t = 1; t <= 200; ++t)
        for (Eigen::Index i = 0; i < 6; ++i)
          worst_equiv = std::max(worst_equiv, ((seen[t].row(i) - x0.row(i)).transpose() - (traj[t - 1] - m0)).norm());

      const Vector m_T = mean_flow_oracle(m0, m_pi, sigma_inv, bound, 1.0, 5000).back();
      const double ratio = (m_T - m_pi).norm() / (m0 - m_pi).norm();
      dim_worst = std::max(dim_worst, ratio);
      contracted += ratio <= kC2Contraction;
    }
    worst_ratio = std::max(worst_ratio, dim_worst);
    per_dim += fmt(" d%d:%.3f", d, dim_worst);
  }
  return {worst_equiv <= kC2Equiv && contracted == draws,
          fmt("max displacement gap %.2e (<= %.0e); contraction <= %.2f in %d/%d draws, worst ratio by dim",
              worst_equiv, kC2Equiv, kC2Contraction, contracted, draws) +
              per_dim};
}

const std::vector<ToyFamily> kFig1 = {ToyFamily::Gaussian2d, ToyFamily::Mog2,     ToyFamily::Donut,
                                      ToyFamily::Banana,     ToyFamily::Squiggle, ToyFamily::Funnel};

// 3. Adaptive Coin SVGD on the toy suite.
Outcome c3() {
  bool ok = true;
  std::string detail;
  for (ToyFamily f : kFig1) {
    const TargetModel t = toy_target(f);
    const auto t0 = Clock::now();
    double k0 = 0.0, k1 = 0.0, ratio = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      SamplerConfig c;
      c.kind = SamplerKind::CoinSvgd;
      c.particles = 20;
      c.iterations = 1000;
      c.seed = s;
      const Matrix x0 = init_normal(s, 20, 2, 0.1);
      const auto r = coin_svgd_run(c, t, x0);
      const double a = ksd(x0, t.score), b = ksd(r.ensemble.positions, t.score);
      k0 += a / 10.0;
      k1 += b / 10.0;
      ratio += b / a / 10.0;
    }
    const double secs = seconds_since(t0);
    const bool pass = k1 <= kC3Ratio * k0 && ratio <= kC3Ratio && secs < kC3Seconds;
    ok = ok && pass;
    detail += fmt(" %s:%.3f/%.3f(%.1fs)", t.name.c_str(), k1 / k0, ratio, secs);
  }
  return {ok, fmt("final/initial KSD as ratio of means/mean of ratios (<= %.2f, < %.0f s each):", kC3Ratio,
                  kC3Seconds) +
                  detail};
}

// 4. Coin SVGD versus the best of a 30-point learning-rate sweep.
Outcome c4() {
  const TargetModel t = toy_target(ToyFamily::Gaussian2d);
  Engine re = make_engine(99, "reference");
  const EnergyReference ref(t.sample(re, 10000));
  const int seeds = 10;
  double coin = 0.0;
  for (int s = 0; s < seeds; ++s) {
    SamplerConfig c;
    c.kind = SamplerKind::CoinSvgd;
    c.seed = static_cast<std::uint64_t>(s);
    coin += ref(coin_svgd_run(c, t, init_normal(c.seed, 20, 2, 0.1)).ensemble.positions) / seeds;
  }
  double best = std::numeric_limits<double>::infinity(), best_lr = 0.0;
  bool best_adagrad = false;
  for (bool adagrad : {false, true})
    for (double lr : harness::log_grid(1e-5, 10.0, 30)) {
      double mean = 0.0;
      bool diverged = false;
      for (int s = 0; s < seeds && !diverged; ++s) {
        SamplerConfig c;
        c.kind = SamplerKind::Svgd;
        c.learning_rate = lr;
        c.adagrad = adagrad;
        c.seed = static_cast<std::uint64_t>(s);
        const auto r = svgd_run(c, t, init_normal(c.seed, 20, 2, 0.1));
        diverged = r.status != RunStatus::Completed;
        mean += ref(r.ensemble.positions) / seeds;
      }
      if (!diverged && mean < best) {
        best = mean;
        best_lr = lr;
        best_adagrad = adagrad;
      }
    }
  return {coin <= kC4Factor * best, fmt("coin %.5f, best SVGD %.5f at lr %.3g%s, ratio %.3f (<= %.1f)", coin, best,
                                        best_lr, best_adagrad ? " (adagrad)" : "", coin / best, kC4Factor)};
}

// 5. Adaptive coin trajectories under per-coordinate gradient rescaling.
Outcome c5() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  int runs = 0;
  for (int d : {1, 3, 6})
    for (std::optional<double> alpha : {std::optional<double>{}, std::optional<double>{100.0}})
      for (int rep = 0; rep < 3; ++rep, ++runs) {
        Matrix b(d, d);
        for (int k = 0; k < d * d; ++k) b.data()[k] = n01(rng);
        const Matrix a = b * b.transpose() + 0.1 * Matrix::Identity(d, d);
        Vector centre(d), x0(d), scale(d);
        for (int j = 0; j < d; ++j) {
          centre[j] = 2.0 * n01(rng);
          x0[j] = n01(rng);
          scale[j] = std::pow(10.0, u(rng));
        }
        Matrix noise(1000, d);
        for (int k = 0; k < 1000 * d; ++k) noise.data()[k] = n01(rng);
        // Random gradient oracle: a noisy convex quadratic.
        auto grad = [&](const Vector& x, int t) -> Vector { return a * (x - centre) + noise.row(t).transpose(); };
        AdaptiveCoin plain(x0, alpha), scaled(x0, alpha);
        Vector xp = x0, xs = x0;
        for (int t = 0; t < 1000; ++t) {
          xp = plain.step(grad(xp, t));
          xs = scaled.step(scale.cwiseProduct(grad(xs, t)));
          worst = std::max(worst, (xp - xs).cwiseAbs().maxCoeff() / std::max(1.0, xp.cwiseAbs().maxCoeff()));
        }
      }

  // Through the sampler: one particle, score rescaled per coordinate.
  const TargetModel base = toy_target(ToyFamily::Banana);
  TargetModel scaled_target = base;
  const Vector s{{1e-3, 250.0}};
  scaled_target.score = [&](const Vector& x) -> Vector { return s.cwiseProduct(base.score(x)); };
  SamplerConfig c;
  c.kind = SamplerKind::CoinSvgd;
  c.particles = 1;
  c.iterations = 1000;
  const Matrix x0{{0.3, -0.4}};
  const Matrix a = coin_svgd_run(c, base, x0).ensemble.positions;
  const Matrix b = coin_svgd_run(c, scaled_target, x0).ensemble.positions;
  const double sampler_err = oracle::rel_err(a, b);
  worst = std::max(worst, sampler_err);
  return {worst <= kC5Rel, fmt("worst relative deviation %.2e over %d coin runs and a Coin SVGD run (<= %.0e)", worst,
                               runs, kC5Rel)};
}

// 6. Analytic derivatives versus centered finite differences.
Outcome c6() {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n01;
  auto point = [&](Eigen::Index d, double sd) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = sd * n01(rng);
    return v;
  };
  double worst = 0.0;
  std::string worst_name;
  int objects = 0;
  auto record = [&](const std::string& name, double e) {
    if (e > worst) {
      worst = e;
      worst_name = name;
    }
  };

  const std::vector<ToyFamily> toys = {
      ToyFamily::Gaussian2d,   ToyFamily::Mog2,        ToyFamily::Donut,
      ToyFamily::Banana,       ToyFamily::Squiggle,    ToyFamily::Funnel,
      ToyFamily::Gauss1d,      ToyFamily::Mog3,        ToyFamily::KsddGaussian,
      ToyFamily::KsddMixture,  ToyFamily::KsddSymmetricMixture};
  for (ToyFamily f : toys) {
    const TargetModel t = toy_target(f);
    ++objects;
    if (t.score_jacobian) ++objects;
    for (int k = 0; k < 100;) {
      const Vector x = point(static_cast<Eigen::Index>(t.dim), 2.0);
      if (f == ToyFamily::Donut && x.norm() < 1e-3) continue;
      ++k;
      record(t.name + " score", oracle::rel_err(t.score(x), oracle::fd_gradient(t.log_density_unnormalized, x)));
      if (t.score_jacobian)
        record(t.name + " jacobian", oracle::rel_err(t.score_jacobian(x), oracle::fd_jacobian(t.score, x)));
    }
  }

  for (Eigen::Index p : {2, 3}) {
    for (bool cosh : {false, true}) {
      IcaProblem prob = ica_generate(p, 200, 60 + static_cast<std::uint64_t>(p));
      prob.cosh_convention = cosh;
      ++objects;
      for (int k = 0; k < 100; ++k) {
        const Vector w = flatten_square(Matrix::Identity(p, p)) + point(p * p, 0.3);
        const Vector g = flatten_square(ica_score(unflatten_square(w, p), prob));
        const Vector fd =
            oracle::fd_gradient([&](const Vector& v) { return ica_log_posterior(unflatten_square(v, p), prob); }, w);
        record("ica score", oracle::rel_err(g, fd));
      }
    }
  }

  {
    const LogRegProblem prob = logreg_problem(300, 4, 7, 50);
    ++objects;
    for (int k = 0; k < 100; ++k) {
      Vector theta = point(5, 0.7);
      theta[4] = 0.5 * n01(rng);
      record("logreg score", oracle::rel_err(logreg_full_score(theta, prob),
                                             oracle::fd_gradient([&](const Vector& v) { return logreg_log_joint(v, prob); },
                                                                 theta)));
    }
  }

  const std::vector<KernelSpec> kernels = {RbfKernel{0.7}, RbfKernel{3.0}, ImqKernel{1.0, -0.5}, ImqKernel{2.0, -0.3}};
  for (const KernelSpec& ks : kernels) {
    objects += 3;
    for (int k = 0; k < 100; ++k) {
      const Eigen::Index d = 1 + k % 3;
      const Vector x = point(d, 1.0), y = point(d, 1.0);
      const Vector z = x - y;
      const auto pr = profile(ks, z.squaredNorm());
      const Vector g1 = 2.0 * pr.d1 * z;
      const double trace = -2.0 * static_cast<double>(d) * pr.d1 - 4.0 * pr.d2 * z.squaredNorm();
      auto kv = [&](const Vector& a, const Vector& b) { return kernel_value(ks, a, b); };
      record("kernel grad1", oracle::rel_err(g1, oracle::fd_gradient([&](const Vector& a) { return kv(a, y); }, x)));
      record("kernel grad2", oracle::rel_err(Vector(-g1), oracle::fd_gradient([&](const Vector& b) { return kv(x, b); }, y)));
      double fd_trace = 0.0;
      const double h = 1e-4;
      for (Eigen::Index j = 0; j < d; ++j) {
        Vector xp = x, xm = x, yp = y, ym = y;
        xp[j] += h;
        xm[j] -= h;
        yp[j] += h;
        ym[j] -= h;
        fd_trace += (kv(xp, yp) - kv(xp, ym) - kv(xm, yp) + kv(xm, ym)) / (4.0 * h * h);
      }
      record("kernel trace_grad12", oracle::rel_err(trace, fd_trace));
      if (std::holds_alternative<RbfKernel>(ks)) {
        const double h_bw = std::get<RbfKernel>(ks).h;
        record("rbf_eval grad1", oracle::rel_err(rbf_eval(x, y, h_bw).grad1, g1));
      } else {
        const auto& imq = std::get<ImqKernel>(ks);
        const ImqValue v = imq_eval(x, y, imq.c, imq.beta);
        record("imq_eval", std::max({oracle::rel_err(v.grad1, g1), oracle::rel_err(v.grad2, Vector(-g1)),
                                     oracle::rel_err(v.trace_grad12, trace)}));
      }
    }
  }

  {
    const TargetModel t = toy_target(ToyFamily::Banana);
    ++objects;
    for (int k = 0; k < 100; ++k) {
      const Vector x = point(2, 1.0), y = point(2, 1.0);
      for (const KernelSpec& ks : {KernelSpec{ImqKernel{}}, KernelSpec{RbfKernel{2.0}}}) {
        const Matrix jy = t.score_jacobian(y);
        const Vector g = stein_kernel_terms(x, y, t.score(x), t.score(y), ks, &jy).grad2;
        const Vector fd = oracle::fd_gradient(
            [&](const Vector& b) { return stein_kernel_terms(x, b, t.score(x), t.score(b), ks).value; }, y);
        record("stein grad2", oracle::rel_err(g, fd));
      }
    }
  }

  {
    const auto table = build_spectral_kernel([](double x) { return x; }, -8.0, 8.0, 1000, 150);
    ++objects;
    std::uniform_real_distribution<double> cell(0.2, 0.8);
    std::uniform_int_distribution<Eigen::Index> node(300, 690);
    for (int k = 0; k < 100; ++k) {
      // Interior of a grid cell, so the interpolant is smooth across the stencil.
      const double x = table.node(node(rng)) + cell(rng) * table.spacing();
      const double y = 2.0 * n01(rng);
      const double h = 1e-3 * table.spacing();
      record("spectral grad1",
             oracle::rel_err(table.grad1(x, y), (table.value(x + h, y) - table.value(x - h, y)) / (2.0 * h)));
    }
  }

  return {worst <= kC6Rel,
          fmt("%d objects x 100 points, worst relative error %.2e (%s) (<= %.0e)", objects, worst, worst_name.c_str(),
              kC6Rel)};
}

// 7. Spectrum of the OU generator.
Outcome c7() {
  const auto table = build_spectral_kernel([](double x) { return x; }, -8.0, 8.0, 1000, 10);
  double worst = 0.0;
  std::string ev;
  for (int i = 0; i < 5; ++i) {
    const double lam = table.eigenvalues()[i];
    worst = std::max(worst, std::abs(lam - (i + 1)) / (i + 1));
    ev += fmt(" %.4f", lam);
  }
  return {worst <= kC7Rel, "eigenvalues" + ev + fmt(", worst relative error %.4f (<= %.2f)", worst, kC7Rel)};
}

// 8. LAWGD and Coin LAWGD on N(3, 1.5).
Outcome c8() {
  const TargetModel t = toy_target(ToyFamily::Gauss1d);
  const auto table =
      build_spectral_kernel([&](double x) { return -t.score(Vector::Constant(1, x))[0]; }, -10.0, 10.0, 1000, 150);
  const Matrix x0 = harness::initial_positions("uniform:-1:1", 100, 1, 1);
  bool ok = true;
  std::string detail;
  for (SamplerKind k : {SamplerKind::Lawgd, SamplerKind::CoinLawgd}) {
    SamplerConfig c;
    c.kind = k;
    c.particles = 100;
    c.iterations = 2500;
    c.seed = 1;
    if (k == SamplerKind::Lawgd) c.learning_rate = 0.1;
    const auto r = lawgd_run(c, t, table, x0);
    const Moments m = moments(r.ensemble.positions);
    const double mean = m.mean[0], var = m.covariance(0, 0);
    const bool pass = r.status == RunStatus::Completed && std::abs(mean - 3.0) <= kC8Mean &&
                      std::abs(var - 1.5) <= kC8VarRel * 1.5;
    ok = ok && pass;
    detail += fmt(" %s mean %.4f var %.4f;", std::string(to_string(k)).c_str(), mean, var);
  }
  return {ok, fmt("(|mean-3| <= %.2f, |var-1.5| <= %.0f%%)", kC8Mean, 100 * kC8VarRel) + detail};
}

// 9. Bayesian ICA with p = 2.
Outcome c9() {
  std::vector<double> coin, random;
  int diverged = 0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const IcaProblem prob = ica_generate(2, 1000, 1000 + rep);
    SamplerConfig c;
    c.kind = SamplerKind::CoinSvgd;
    c.particles = 10;
    c.iterations = 2000;
    c.seed = rep;
    const auto r = coin_svgd_run(c, ica_target(prob), init_normal(rep, 10, 4, 0.1));
    diverged += r.status != RunStatus::Completed;
    for (Eigen::Index i = 0; i < 10; ++i) {
      coin.push_back(amari_distance(unflatten_square(r.ensemble.positions.row(i).transpose(), 2), prob.w_true));
      Engine e = make_engine(rep, "random", static_cast<std::uint64_t>(i));
      random.push_back(amari_distance(normal_matrix(e, 2, 2, 1.0), prob.w_true));
    }
  }
  const double mc = median(coin), mr = median(random);
  return {diverged == 0 && mc < kC9Ratio * mr,
          fmt("median Amari coin %.4f, random %.4f, ratio %.3f (< %.2f), %d diverged", mc, mr, mc / mr, kC9Ratio,
              diverged)};
}

// 10. KSDD symmetry trap and annealing.
Outcome c10() {
  auto fractions = [](const Matrix& x, const Vector& mu, double sa, double sb) {
    int a = 0, b = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Vector p = x.row(i).transpose();
      a += (p - mu).norm() < 3.0 * sa;
      b += (p + mu).norm() < 3.0 * sb;
    }
    const double n = static_cast<double>(x.rows());
    return std::pair{a / n, b / n};
  };
  auto run = [](const TargetModel& t, std::uint64_t s, bool anneal) {
    SamplerConfig c;
    c.kind = SamplerKind::CoinKsdd;
    c.particles = 20;
    c.iterations = 5000;
    c.seed = s;
    if (anneal) c.anneal = AnnealSchedule{0.02, 2500};
    return coin_ksdd_run(c, t, init_normal(s, 20, 2, 0.5)).ensemble.positions;
  };

  const TargetModel trap = toy_target(ToyFamily::KsddMixture);
  const TargetModel sym = toy_target(ToyFamily::KsddSymmetricMixture);
  double far_max = 0.0, mode_min = 1.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    far_max = std::max(far_max, fractions(run(trap, s, false), Vector{{6.0, 0.0}}, std::sqrt(2.0), 1.0).second);
    const auto [a, b] = fractions(run(sym, s, true), Vector{{5.0, 5.0}}, std::sqrt(2.0), std::sqrt(2.0));
    mode_min = std::min({mode_min, a, b});
  }
  return {far_max < kC10Trap && mode_min >= kC10Mode,
          fmt("unannealed far-mode share max %.2f (< %.2f); annealed per-mode share min %.2f (>= %.2f), 10 seeds",
              far_max, kC10Trap, mode_min, kC10Mode)};
}

// 11. Metric oracles.
Outcome c11() {
  const TargetModel t = toy_target(ToyFamily::Squiggle);
  bool ksd_exact = true;
  for (int n : {1, 2, 13, 50}) {
    Engine e = make_engine(static_cast<std::uint64_t>(n), "ksd-oracle");
    const Matrix x = normal_matrix(e, n, 2, 1.5);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += stein_kernel_value(x.row(i).transpose(), x.row(j).transpose(), t.score, ImqKernel{});
      sum += row;
    }
    const double want = std::sqrt(std::max(sum / (n * n), 0.0));
    ksd_exact = ksd_exact && ksd(x, t.score) == want && ksd(x, t.score, 1.0, -0.5, nullptr, 4) == want;
  }

  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  double amari_perm = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index p = 2 + rep % 4;
    Matrix w(p, p);
    for (Eigen::Index k = 0; k < p * p; ++k) w.data()[k] = n01(rng);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix est = permute_rows(w, perm);
    for (Eigen::Index i = 0; i < p; ++i) est.row(i) *= (rep % 2 ? -1.0 : 1.0) * std::exp(n01(rng));
    amari_perm = std::max(amari_perm, amari_distance(est, w));
  }
  const double amari_hand = amari_distance(Matrix{{1.0, 1.0}, {0.0, 1.0}}, Matrix::Identity(2, 2));

  Engine e = make_engine(11, "energy");
  const Matrix x = normal_matrix(e, 40, 3, 1.0);
  std::vector<Eigen::Index> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const double ed_same = energy_distance(x, x), ed_perm = energy_distance(x, permute_rows(x, perm));

  const bool ok = ksd_exact && amari_perm <= kC11Amari && std::abs(amari_hand - 0.5) <= kC11Amari &&
                  std::abs(ed_same) <= 1e-12 && std::abs(ed_perm) <= 1e-12;
  return {ok, fmt("KSD brute-force exact: %s; Amari scaled-permutation max %.1e, hand instance %.12f; energy on "
                  "identical multisets %.1e / %.1e",
                  ksd_exact ? "yes" : "no", amari_perm, amari_hand, ed_same, ed_perm)};
}

// 12. Thread-count determinism and permutation equivariance.
Outcome c12() {
  namespace fs = std::filesystem;
  struct Case {
    SamplerKind kind;
    std::string target;
    std::optional<double> lr;
  };
  const std::vector<Case> cases = {
      {SamplerKind::Svgd, "banana", 0.05},        {SamplerKind::CoinSvgd, "banana", {}},
      {SamplerKind::CoinSvgdPlain, "banana", {}}, {SamplerKind::Lawgd, "gauss1d", 0.1},
      {SamplerKind::CoinLawgd, "gauss1d", {}},    {SamplerKind::Ksdd, "mog2", 0.05},
      {SamplerKind::CoinKsdd, "mog2", {}},        {SamplerKind::Sgld, "banana", 0.01}};

  const fs::path root = fs::temp_directory_path() / "coinsamp-acceptance";
  int identical = 0;
  for (const Case& k : cases) {
    harness::RunOptions o;
    o.sampler.kind = k.kind;
    o.sampler.particles = 16;
    o.sampler.iterations = 150;
    o.sampler.seed = 12;
    o.sampler.learning_rate = k.lr;
    if (k.kind == SamplerKind::CoinSvgdPlain) o.sampler.bound = 5.0;
    o.target = k.target;
    o.snapshot_every = 50;
    o.reference_size = 500;
    o.grid_n = 400;
    o.modes = 40;
    o.no_clock = true;
    bool same = true;
    std::vector<fs::path> dirs;
    for (std::size_t threads : {1, 4}) {
      o.sampler.threads = threads;
      const fs::path dir = root / (std::string(to_string(k.kind)) + "-t" + std::to_string(threads));
      fs::remove_all(dir);
      harness::run_experiment(o, dir);
      dirs.push_back(dir);
    }
    for (const auto& f : fs::directory_iterator(dirs[0])) {
      auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
      };
      const fs::path other = dirs[1] / f.path().filename();
      same = same && fs::exists(other) && slurp(f.path()) == slurp(other);
    }
    identical += same;
  }

  std::mt19937_64 rng(12);
  std::vector<Eigen::Index> perm(14);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const TargetModel t2 = toy_target(ToyFamily::Banana);
  const TargetModel t1 = toy_target(ToyFamily::Gauss1d);
  const auto table =
      build_spectral_kernel([&](double x) { return -t1.score(Vector::Constant(1, x))[0]; }, -10.0, 10.0, 400, 40);
  double worst = 0.0;
  int equivariant = 0;
  for (const Case& k : cases) {
    const bool one_d = k.target == "gauss1d";
    const Matrix x0 = one_d ? harness::initial_positions("uniform:-1:1", 14, 1, 3)
                            : harness::initial_positions("normal:0.5", 14, 2, 3);
    SamplerConfig c;
    c.kind = k.kind;
    c.particles = 14;
    c.iterations = 150;
    c.seed = 3;
    c.learning_rate = k.lr;
    if (k.kind == SamplerKind::CoinSvgdPlain) c.bound = 5.0;
    SamplerConfig cp = c;
    if (k.kind == SamplerKind::Sgld) {
      for (std::uint64_t i = 0; i < 14; ++i) c.particle_seeds.push_back(500 + i);
      cp.particle_seeds = c.particle_seeds;
      for (std::size_t i = 0; i < 14; ++i) cp.particle_seeds[i] = c.particle_seeds[static_cast<std::size_t>(perm[i])];
    }
    const TargetModel& t = one_d ? t1 : t2;
    const Matrix a = permute_rows(run_sampler(c, t, x0, {}, &table).ensemble.positions, perm);
    const Matrix b = run_sampler(cp, t, permute_rows(x0, perm), {}, &table).ensemble.positions;
    const bool same = a == b;
    equivariant += same;
    if (!same) worst = std::max(worst, oracle::rel_err(a, b));
  }
  const int n = static_cast<int>(cases.size());
  return {identical == n && equivariant == n,
          fmt("byte-identical outputs at 1 and 4 threads for %d/%d samplers; bitwise permutation equivariance for "
              "%d/%d (worst mismatch %.1e)",
              identical, n, equivariant, n, worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"coin-betting optimizer sanity", c1},
      {"Gaussian mean-flow oracle", c2},
      {"toy suite KSD decay", c3},
      {"coin versus tuned SVGD", c4},
      {"learning-rate-free scaling", c5},
      {"gradient correctness", c6},
      {"OU spectrum", c7},
      {"LAWGD and Coin LAWGD 1-D Gaussian", c8},
      {"Bayesian ICA p=2", c9},
      {"KSDD symmetry trap and annealing", c10},
      {"metric oracles", c11},
      {"determinism and equivariance", c12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << fmt(" [%.1f s]", seconds_since(t0)) << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
