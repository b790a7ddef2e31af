#pragma once

#include <Eigen/Cholesky>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coinsamp/rng.hpp"
#include "coinsamp/types.hpp"

namespace coinsamp {

/// A sampling problem pi(x) ∝ exp(-U(x)) accessed through its score.
///
/// Only `score` is mandatory. `stochastic_score` (when present) is an unbiased
/// minibatch estimate keyed by an explicit batch seed; `score` is then the
/// full-data gradient and is what metrics use.
struct TargetModel {
  using ScoreFn = std::function<Vector(const Vector&)>;
  using StochasticScoreFn = std::function<Vector(const Vector&, std::uint64_t)>;
  using LogDensityFn = std::function<double(const Vector&)>;
  using JacobianFn = std::function<Matrix(const Vector&)>;
  using SamplerFn = std::function<Matrix(Engine&, std::size_t)>;
  using DirectionFn = std::function<Matrix(const Matrix&)>;

  std::string name;
  std::size_t dim = 0;
  ScoreFn score;
  LogDensityFn log_density_unnormalized;
  /// d score_a / d x_b; finite differences are used where this is absent.
  JacobianFn score_jacobian;
  StochasticScoreFn stochastic_score;
  /// Exact i.i.d. draws from pi, used for reference samples.
  SamplerFn sample;
  /// Exact Wasserstein gradient of KL(mu | pi) for the empirical ensemble, when known.
  DirectionFn exact_direction;
  /// Counts score evaluations at non-differentiable points.
  std::shared_ptr<std::atomic<std::size_t>> singular_hits =
      std::make_shared<std::atomic<std::size_t>>(0);

  bool stochastic() const { return static_cast<bool>(stochastic_score); }
  bool has_log_density() const { return static_cast<bool>(log_density_unnormalized); }
};

/// Central-difference Jacobian of the score.
inline Matrix finite_difference_jacobian(const TargetModel::ScoreFn& score, const Vector& x,
                                         double step = 1e-5) {
  const auto d = x.size();
  Matrix j(d, d);
  Vector xp = x, xm = x;
  for (Eigen::Index b = 0; b < d; ++b) {
    xp[b] = x[b] + step;
    xm[b] = x[b] - step;
    j.col(b) = (score(xp) - score(xm)) / (2.0 * step);
    xp[b] = xm[b] = x[b];
  }
  return j;
}

inline Matrix score_jacobian(const TargetModel& t, const Vector& x) {
  return t.score_jacobian ? t.score_jacobian(x) : finite_difference_jacobian(t.score, x);
}

namespace detail {

inline bool is_symmetric(const Matrix& m, double tol = 1e-12) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + m.cwiseAbs().maxCoeff());
}

/// Cholesky factor of an SPD matrix; throws InvalidArgument otherwise.
inline Matrix spd_cholesky(const Matrix& m, const char* what) {
  require(m.allFinite() && is_symmetric(m), std::string(what) + ": matrix must be symmetric");
  Eigen::LLT<Matrix> llt(m);
  require(llt.info() == Eigen::Success, std::string(what) + ": matrix must be positive definite");
  return llt.matrixL();
}

inline Vector standard_normal(Engine& rng, Eigen::Index d) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector z(d);
  for (Eigen::Index i = 0; i < d; ++i) z[i] = n01(rng);
  return z;
}

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace detail

/// N(mean, precision^{-1}).
inline TargetModel gaussian(const Vector& mean, const Matrix& precision, std::string name = "gaussian") {
  detail::require(mean.size() == precision.rows(), "gaussian: dimension mismatch");
  detail::spd_cholesky(precision, "gaussian precision");
  const Matrix cov = precision.inverse();
  const Matrix chol = detail::spd_cholesky(0.5 * (cov + cov.transpose()), "gaussian covariance");
  TargetModel t;
  t.name = std::move(name);
  t.dim = static_cast<std::size_t>(mean.size());
  t.score = [mean, precision](const Vector& x) -> Vector { return -precision * (x - mean); };
  t.log_density_unnormalized = [mean, precision](const Vector& x) {
    const Vector z = x - mean;
    return -0.5 * z.dot(precision * z);
  };
  t.score_jacobian = [precision](const Vector&) -> Matrix { return -precision; };
  t.sample = [mean, chol](Engine& rng, std::size_t n) {
    Matrix out(static_cast<Eigen::Index>(n), mean.size());
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      out.row(i) = (mean + chol * detail::standard_normal(rng, mean.size())).transpose();
    return out;
  };
  return t;
}

inline TargetModel gaussian_from_covariance(const Vector& mean, const Matrix& cov,
                                            std::string name = "gaussian") {
  detail::spd_cholesky(cov, "gaussian covariance");
  return gaussian(mean, cov.inverse(), std::move(name));
}

/// sum_k w_k N(mean_k, cov_k).
inline TargetModel gaussian_mixture(const std::vector<double>& weights, const std::vector<Vector>& means,
                                    const std::vector<Matrix>& covs, std::string name = "mixture") {
  const std::size_t k = weights.size();
  detail::require(k >= 1 && means.size() == k && covs.size() == k, "gaussian_mixture: component count mismatch");
  double total = 0.0;
  for (double w : weights) {
    detail::require(w > 0.0, "gaussian_mixture: weights must be positive");
    total += w;
  }
  detail::require(std::abs(total - 1.0) < 1e-9, "gaussian_mixture: weights must sum to 1");
  const auto d = means[0].size();
  struct Component {
    double log_w;
    Vector mean;
    Matrix precision;
    Matrix chol;
    double log_norm;
  };
  std::vector<Component> comps;
  for (std::size_t c = 0; c < k; ++c) {
    detail::require(means[c].size() == d && covs[c].rows() == d, "gaussian_mixture: dimension mismatch");
    Matrix chol = detail::spd_cholesky(covs[c], "gaussian_mixture covariance");
    const double log_det = 2.0 * chol.diagonal().array().log().sum();
    comps.push_back({std::log(weights[c]), means[c], covs[c].inverse(), chol,
                     -0.5 * log_det - 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi)});
  }
  auto shared = std::make_shared<const std::vector<Component>>(std::move(comps));

  // Per-component log weights and scores at x.
  auto evaluate = [shared](const Vector& x, Vector& logp, std::vector<Vector>& scores) {
    const auto& cs = *shared;
    logp.resize(static_cast<Eigen::Index>(cs.size()));
    scores.resize(cs.size());
    for (std::size_t c = 0; c < cs.size(); ++c) {
      const Vector z = x - cs[c].mean;
      scores[c] = -cs[c].precision * z;
      logp[static_cast<Eigen::Index>(c)] = cs[c].log_w + cs[c].log_norm - 0.5 * z.dot(-scores[c]);
    }
  };
  auto responsibilities = [](const Vector& logp) -> Vector {
    const double m = logp.maxCoeff();
    Vector r = (logp.array() - m).exp().matrix();
    return r / r.sum();
  };

  TargetModel t;
  t.name = std::move(name);
  t.dim = static_cast<std::size_t>(d);
  t.score = [evaluate, responsibilities](const Vector& x) -> Vector {
    Vector logp;
    std::vector<Vector> s;
    evaluate(x, logp, s);
    const Vector r = responsibilities(logp);
    Vector out = Vector::Zero(x.size());
    for (std::size_t c = 0; c < s.size(); ++c) out += r[static_cast<Eigen::Index>(c)] * s[c];
    return out;
  };
  t.log_density_unnormalized = [evaluate](const Vector& x) {
    Vector logp;
    std::vector<Vector> s;
    evaluate(x, logp, s);
    const double m = logp.maxCoeff();
    return m + std::log((logp.array() - m).exp().sum());
  };
  t.score_jacobian = [shared, evaluate, responsibilities](const Vector& x) -> Matrix {
    Vector logp;
    std::vector<Vector> s;
    evaluate(x, logp, s);
    const Vector r = responsibilities(logp);
    Vector mean_s = Vector::Zero(x.size());
    Matrix j = Matrix::Zero(x.size(), x.size());
    for (std::size_t c = 0; c < s.size(); ++c) {
      const double rc = r[static_cast<Eigen::Index>(c)];
      mean_s += rc * s[c];
      j += rc * (s[c] * s[c].transpose() - (*shared)[c].precision);
    }
    return j - mean_s * mean_s.transpose();
  };
  t.sample = [shared, weights](Engine& rng, std::size_t n) {
    const auto& cs = *shared;
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    Matrix out(static_cast<Eigen::Index>(n), cs[0].mean.size());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const auto& c = cs[pick(rng)];
      out.row(i) = (c.mean + c.chol * detail::standard_normal(rng, c.mean.size())).transpose();
    }
    return out;
  };
  return t;
}

/// p(x) ∝ exp(-(|x| - r0)^2 / (2 sigma2)) in two dimensions. The score at the
/// origin is defined as zero and counted in `singular_hits`.
inline TargetModel donut(double r0 = 2.5, double sigma2 = 0.5) {
  detail::require(r0 > 0.0, "donut: r0 must be positive");
  detail::require(sigma2 > 0.0, "donut: sigma^2 must be positive");
  TargetModel t;
  t.name = "donut";
  t.dim = 2;
  auto hits = t.singular_hits;
  t.score = [r0, sigma2, hits](const Vector& x) -> Vector {
    const double r = x.norm();
    if (r == 0.0) {
      ++*hits;
      return Vector::Zero(x.size());
    }
    return (-(r - r0) / (sigma2 * r)) * x;
  };
  t.log_density_unnormalized = [r0, sigma2](const Vector& x) {
    const double r = x.norm() - r0;
    return -r * r / (2.0 * sigma2);
  };
  t.score_jacobian = [r0, sigma2, hits](const Vector& x) -> Matrix {
    const double r = x.norm();
    const auto d = x.size();
    if (r == 0.0) {
      ++*hits;
      return Matrix::Zero(d, d);
    }
    const Vector u = x / r;
    const Matrix uu = u * u.transpose();
    return -(uu + ((r - r0) / r) * (Matrix::Identity(d, d) - uu)) / sigma2;
  };
  t.sample = [r0, sigma2](Engine& rng, std::size_t n) {
    const double sd = std::sqrt(sigma2);
    const double r_max = r0 + 8.0 * sd;
    std::normal_distribution<double> radial(r0, sd);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix out(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      double r;
      do {
        r = radial(rng);
      } while (r <= 0.0 || r > r_max || unif(rng) * r_max > r);
      const double a = 2.0 * std::numbers::pi * unif(rng);
      out(i, 0) = r * std::cos(a);
      out(i, 1) = r * std::sin(a);
    }
    return out;
  };
  return t;
}

namespace detail {

/// Gaussian in warped coordinates x' = (f1 * x1, g2 * x2 + w(x1)), a
/// unit-Jacobian-determinant family covering the banana and squiggle targets.
struct WarpedGaussian {
  double f1;  // dx'_1/dx_1
  double g2;  // dx'_2/dx_2
  std::function<double(double)> w, dw, d2w;
  Vector mean;
  Matrix precision;

  Vector warp(const Vector& x) const { return Vector{{f1 * x[0], g2 * x[1] + w(x[0])}}; }
  Matrix jacobian(const Vector& x) const { return Matrix{{f1, 0.0}, {dw(x[0]), g2}}; }
};

inline TargetModel warped_gaussian_target(std::shared_ptr<const WarpedGaussian> g, std::string name) {
  const Matrix cov = g->precision.inverse();
  const Matrix chol = spd_cholesky(0.5 * (cov + cov.transpose()), "warped gaussian covariance");
  TargetModel t;
  t.name = std::move(name);
  t.dim = 2;
  t.score = [g](const Vector& x) -> Vector {
    require(x.size() == 2, "warped target: expected a 2-vector");
    return -g->jacobian(x).transpose() * (g->precision * (g->warp(x) - g->mean));
  };
  t.log_density_unnormalized = [g](const Vector& x) {
    const Vector z = g->warp(x) - g->mean;
    return -0.5 * z.dot(g->precision * z);
  };
  t.score_jacobian = [g](const Vector& x) -> Matrix {
    const Matrix jt = g->jacobian(x);
    const Vector v = g->precision * (g->warp(x) - g->mean);
    Matrix h = -jt.transpose() * g->precision * jt;
    h(0, 0) -= v[1] * g->d2w(x[0]);
    return h;
  };
  t.sample = [g, chol](Engine& rng, std::size_t n) {
    Matrix out(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const Vector xp = g->mean + chol * standard_normal(rng, 2);
      const double x1 = xp[0] / g->f1;
      out(i, 0) = x1;
      out(i, 1) = (xp[1] - g->w(x1)) / g->g2;
    }
    return out;
  };
  return t;
}

}  // namespace detail

/// Rosenbrock banana: Gaussian N(mean, cov) in x'_1 = x_1 / a,
/// x'_2 = a x_2 + a b (x_1^2 + a^2).
inline TargetModel banana(double a = -1.0, double b = 1.0, Vector mean = Vector{{0.0, 1.0}},
                          Matrix cov = Matrix{{1.0, 0.5}, {0.5, 1.0}}) {
  detail::require(a != 0.0 && std::isfinite(a), "banana: a must be nonzero");
  detail::spd_cholesky(cov, "banana covariance");
  auto g = std::make_shared<detail::WarpedGaussian>();
  g->f1 = 1.0 / a;
  g->g2 = a;
  g->w = [a, b](double x1) { return a * b * (x1 * x1 + a * a); };
  g->dw = [a, b](double x1) { return 2.0 * a * b * x1; };
  g->d2w = [a, b](double) { return 2.0 * a * b; };
  g->mean = std::move(mean);
  g->precision = cov.inverse();
  return detail::warped_gaussian_target(std::move(g), "banana");
}

/// Squiggle: Gaussian N(mean, cov) in x'_1 = x_1, x'_2 = x_2 + sin(omega x_1).
inline TargetModel squiggle(Vector mean = Vector{{1.0, 1.0}},
                            Matrix cov = Matrix{{2.0, 0.25}, {0.25, 0.5}}, double omega = 2.0) {
  detail::spd_cholesky(cov, "squiggle covariance");
  auto g = std::make_shared<detail::WarpedGaussian>();
  g->f1 = 1.0;
  g->g2 = 1.0;
  g->w = [omega](double x1) { return std::sin(omega * x1); };
  g->dw = [omega](double x1) { return omega * std::cos(omega * x1); };
  g->d2w = [omega](double x1) { return -omega * omega * std::sin(omega * x1); };
  g->mean = std::move(mean);
  g->precision = cov.inverse();
  return detail::warped_gaussian_target(std::move(g), "squiggle");
}

/// Funnel: N(x_1; mu1, exp(x_2)) N(x_2; mu2, sigma2^2).
inline TargetModel funnel(double mu1 = 1.0, double mu2 = 4.0, double sigma2 = 3.0) {
  detail::require(sigma2 > 0.0, "funnel: sigma must be positive");
  const double v2 = sigma2 * sigma2;
  TargetModel t;
  t.name = "funnel";
  t.dim = 2;
  t.score = [mu1, mu2, v2](const Vector& x) -> Vector {
    const double e = std::exp(-x[1]);
    const double dx = x[0] - mu1;
    return Vector{{-dx * e, 0.5 * dx * dx * e - 0.5 - (x[1] - mu2) / v2}};
  };
  t.log_density_unnormalized = [mu1, mu2, v2](const Vector& x) {
    const double dx = x[0] - mu1;
    const double dy = x[1] - mu2;
    return -0.5 * x[1] - 0.5 * dx * dx * std::exp(-x[1]) - 0.5 * dy * dy / v2;
  };
  t.score_jacobian = [mu1, v2](const Vector& x) -> Matrix {
    const double e = std::exp(-x[1]);
    const double dx = x[0] - mu1;
    return Matrix{{-e, dx * e}, {dx * e, -0.5 * dx * dx * e - 1.0 / v2}};
  };
  t.sample = [mu1, mu2, sigma2](Engine& rng, std::size_t n) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Matrix out(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double x2 = mu2 + sigma2 * n01(rng);
      out(i, 1) = x2;
      out(i, 0) = mu1 + std::exp(0.5 * x2) * n01(rng);
    }
    return out;
  };
  return t;
}

enum class ToyFamily {
  Gaussian2d,
  Mog2,
  Donut,
  Banana,
  Squiggle,
  Funnel,
  Gauss1d,
  Mog3,
  KsddGaussian,
  KsddMixture,
  KsddSymmetricMixture,
};

/// The benchmark targets with their default parameters.
inline TargetModel toy_target(ToyFamily family) {
  switch (family) {
    case ToyFamily::Gaussian2d:
      return gaussian(Vector{{-1.0, 1.0}}, Matrix{{3.0, -0.5}, {-0.5, 1.0}}, "gaussian2d");
    case ToyFamily::Mog2: {
      const Matrix c = 0.5 * Matrix::Identity(2, 2);
      return gaussian_mixture({0.5, 0.5}, {Vector{{-2.0, 2.0}}, Vector{{2.0, -2.0}}}, {c, c}, "mog2");
    }
    case ToyFamily::Donut:
      return donut();
    case ToyFamily::Banana:
      return banana();
    case ToyFamily::Squiggle:
      return squiggle();
    case ToyFamily::Funnel:
      return funnel();
    case ToyFamily::Gauss1d:
      return gaussian_from_covariance(Vector{{3.0}}, Matrix{{1.5}}, "gauss1d");
    case ToyFamily::Mog3:
      return gaussian_mixture({1.0 / 3.0, 0.5, 1.0 / 6.0}, {Vector{{6.0}}, Vector{{-3.0}}, Vector{{2.0}}},
                              {Matrix{{2.0}}, Matrix{{1.0}}, Matrix{{1.0}}}, "mog3");
    case ToyFamily::KsddGaussian:
      return gaussian(Vector{{-3.0, 3.0}}, Matrix{{0.2, -0.05}, {-0.05, 0.1}}, "ksdd-gauss");
    case ToyFamily::KsddMixture:
      return gaussian_mixture({0.5, 0.5}, {Vector{{6.0, 0.0}}, Vector{{-6.0, 0.0}}},
                              {2.0 * Matrix::Identity(2, 2), Matrix::Identity(2, 2)}, "ksdd-mog");
    case ToyFamily::KsddSymmetricMixture:
      return gaussian_mixture({0.5, 0.5}, {Vector{{5.0, 5.0}}, Vector{{-5.0, -5.0}}},
                              {2.0 * Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)}, "ksdd-mog-sym");
  }
  throw InvalidArgument("toy_target: unknown family");
}

/// Tempered target pi_beta ∝ exp(-beta U).
inline TargetModel anneal(const TargetModel& target, double beta) {
  detail::require(beta > 0.0 && beta <= 1.0 && std::isfinite(beta), "anneal: beta must lie in (0, 1]");
  detail::require(static_cast<bool>(target.score), "anneal: target has no score");
  if (beta == 1.0) {
    TargetModel same = target;
    same.name = target.name + "@beta=1";
    return same;
  }
  TargetModel t;
  t.name = target.name + "@beta=" + detail::fmt_double(beta);
  t.dim = target.dim;
  t.singular_hits = target.singular_hits;
  t.score = [s = target.score, beta](const Vector& x) -> Vector { return beta * s(x); };
  if (target.log_density_unnormalized)
    t.log_density_unnormalized = [f = target.log_density_unnormalized, beta](const Vector& x) { return beta * f(x); };
  if (target.score_jacobian)
    t.score_jacobian = [f = target.score_jacobian, beta](const Vector& x) -> Matrix { return beta * f(x); };
  if (target.stochastic_score)
    t.stochastic_score = [f = target.stochastic_score, beta](const Vector& x, std::uint64_t k) -> Vector {
      return beta * f(x, k);
    };
  return t;
}

/// Exact Wasserstein gradient of KL(N(m_t, S) | N(m_pi, S)): S^{-1}(m_t - m_pi), constant in x.
inline Vector gaussian_exact_gradient(const Vector& m_t, const Vector& m_pi, const Matrix& sigma_inv) {
  detail::require(m_t.size() == m_pi.size() && sigma_inv.rows() == m_t.size(),
                  "gaussian_exact_gradient: dimension mismatch");
  detail::spd_cholesky(sigma_inv, "gaussian_exact_gradient");
  return sigma_inv * (m_t - m_pi);
}

/// Gaussian target whose `exact_direction` replaces the kernelized gradient
/// with the closed-form one evaluated at the ensemble mean.
inline TargetModel gaussian_exact(const Vector& mean, const Matrix& precision) {
  TargetModel t = gaussian(mean, precision, "gauss-exact");
  t.exact_direction = [mean, precision](const Matrix& positions) -> Matrix {
    const Vector m = positions.colwise().mean().transpose();
    const Vector g = precision * (m - mean);
    return g.transpose().replicate(positions.rows(), 1);
  };
  return t;
}

}  // namespace coinsamp
