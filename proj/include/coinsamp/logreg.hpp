#pragma once

// Bayesian logistic regression with p(y = 1 | x, w) = sigmoid(w'x),
// w | alpha ~ N(0, alpha^{-1} I), alpha ~ Gamma(shape, rate), sampled in
// theta = [w, log alpha].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <unordered_set>
#include <vector>

#include "coinsamp/rng.hpp"
#include "coinsamp/targets.hpp"

namespace coinsamp {

enum class Split : int { Train = 0, Validation = 1, Test = 2 };

struct LogRegDataset {
  Matrix features;
  /// Labels in {-1, +1}.
  Vector labels;
  std::vector<Split> split;
  Vector w_true;
  std::uint64_t seed = 0;
};

struct LogRegProblem {
  Matrix features;
  Vector labels;
  std::size_t batch_size = 100;
  double prior_shape = 1.0;
  double prior_rate = 0.01;

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index p() const { return features.cols(); }
};

inline double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

/// log sigmoid(z), stable for large |z|.
inline double log_sigmoid(double z) { return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

/// Gaussian features, ground-truth weights w ~ N(0, I), Bernoulli labels, and a
/// random 70/10/20 train/validation/test assignment.
inline LogRegDataset logreg_generate(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  detail::require(n >= 1 && p >= 1, "logreg_generate: need n >= 1 and p >= 1");
  Engine rng = make_engine(seed, "logreg.data");
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  LogRegDataset ds;
  ds.seed = seed;
  ds.w_true.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) ds.w_true[j] = n01(rng);
  ds.features.resize(n, p);
  ds.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) ds.features(i, j) = n01(rng);
    const double prob = sigmoid(ds.features.row(i).dot(ds.w_true));
    ds.labels[i] = unif(rng) < prob ? 1.0 : -1.0;
  }
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Engine split_rng = make_engine(seed, "logreg.split");
  std::shuffle(order.begin(), order.end(), split_rng);
  ds.split.assign(order.size(), Split::Train);
  const auto n_train = static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n)));
  for (std::size_t r = 0; r < order.size(); ++r)
    ds.split[order[r]] = r < n_train ? Split::Train : (r < n_train + n_val ? Split::Validation : Split::Test);
  return ds;
}

/// Rows of `ds` in the given split.
inline LogRegProblem logreg_problem(const LogRegDataset& ds, Split which, std::size_t batch_size) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < ds.split.size(); ++i)
    if (ds.split[i] == which) rows.push_back(static_cast<Eigen::Index>(i));
  detail::require(!rows.empty(), "logreg_problem: empty split");
  LogRegProblem prob;
  prob.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
  prob.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    prob.features.row(static_cast<Eigen::Index>(r)) = ds.features.row(rows[r]);
    prob.labels[static_cast<Eigen::Index>(r)] = ds.labels[rows[r]];
  }
  prob.batch_size = std::min(batch_size, rows.size());
  return prob;
}

/// Synthetic problem using every generated row.
inline LogRegProblem logreg_problem(Eigen::Index n, Eigen::Index p, std::uint64_t seed, std::size_t batch_size) {
  const LogRegDataset ds = logreg_generate(n, p, seed);
  detail::require(batch_size >= 1 && batch_size <= static_cast<std::size_t>(n),
                  "logreg_problem: batch size must lie in [1, n]");
  return {ds.features, ds.labels, batch_size};
}

namespace detail {

inline void check_theta(const Vector& theta, const LogRegProblem& prob) {
  require(theta.size() == prob.p() + 1, "logreg: theta must have p + 1 entries");
  require(theta.allFinite(), "logreg: non-finite theta");
}

/// Gradient of the prior terms (Gaussian on w, Gamma on alpha, log-alpha Jacobian).
inline Vector logreg_prior_grad(const Vector& theta, const LogRegProblem& prob) {
  const Eigen::Index p = prob.p();
  const auto w = theta.head(p);
  const double alpha = std::exp(theta[p]);
  Vector g(p + 1);
  g.head(p) = -alpha * w;
  g[p] = 0.5 * static_cast<double>(p) - 0.5 * alpha * w.squaredNorm() + (prob.prior_shape - 1.0) -
         prob.prior_rate * alpha + 1.0;
  return g;
}

}  // namespace detail

/// Log joint density of theta up to a constant, using every row.
inline double logreg_log_joint(const Vector& theta, const LogRegProblem& prob) {
  detail::check_theta(theta, prob);
  const Eigen::Index p = prob.p();
  const auto w = theta.head(p);
  const double log_alpha = theta[p];
  const double alpha = std::exp(log_alpha);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < prob.n(); ++i) ll += log_sigmoid(prob.labels[i] * prob.features.row(i).dot(w));
  const double log_prior_w = 0.5 * static_cast<double>(p) * log_alpha - 0.5 * alpha * w.squaredNorm();
  const double log_prior_alpha = (prob.prior_shape - 1.0) * log_alpha - prob.prior_rate * alpha;
  return ll + log_prior_w + log_prior_alpha + log_alpha;
}

/// Full-batch score of theta.
inline Vector logreg_full_score(const Vector& theta, const LogRegProblem& prob) {
  detail::check_theta(theta, prob);
  const Eigen::Index p = prob.p();
  const auto w = theta.head(p);
  Vector g = detail::logreg_prior_grad(theta, prob);
  for (Eigen::Index i = 0; i < prob.n(); ++i) {
    const double y = prob.labels[i];
    g.head(p) += (y * sigmoid(-y * prob.features.row(i).dot(w))) * prob.features.row(i).transpose();
  }
  return g;
}

/// Distinct minibatch row indices drawn by Floyd's algorithm from `batch_seed`.
inline std::vector<Eigen::Index> logreg_batch(std::size_t n, std::size_t batch, std::uint64_t batch_seed) {
  Engine rng(mix64(batch_seed));
  std::unordered_set<std::size_t> taken;
  std::vector<Eigen::Index> rows;
  rows.reserve(batch);
  for (std::size_t j = n - batch; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng);
    const std::size_t chosen = taken.count(t) != 0 ? j : t;
    taken.insert(chosen);
    rows.push_back(static_cast<Eigen::Index>(chosen));
  }
  return rows;
}

/// Unbiased minibatch score: (n / B) sum over the batch of the likelihood
/// gradient plus the exact prior gradient.
inline Vector logreg_score(const Vector& theta, const LogRegProblem& prob, std::uint64_t batch_seed) {
  detail::check_theta(theta, prob);
  const Eigen::Index p = prob.p();
  const auto w = theta.head(p);
  const auto n = static_cast<std::size_t>(prob.n());
  const std::size_t b = std::min(prob.batch_size, n);
  Vector lik = Vector::Zero(p);
  for (Eigen::Index i : logreg_batch(n, b, batch_seed)) {
    const double y = prob.labels[i];
    lik += (y * sigmoid(-y * prob.features.row(i).dot(w))) * prob.features.row(i).transpose();
  }
  Vector g = detail::logreg_prior_grad(theta, prob);
  g.head(p) += (static_cast<double>(n) / static_cast<double>(b)) * lik;
  return g;
}

inline TargetModel logreg_target(std::shared_ptr<const LogRegProblem> prob) {
  TargetModel t;
  t.name = "logreg";
  t.dim = static_cast<std::size_t>(prob->p() + 1);
  t.score = [prob](const Vector& x) -> Vector { return logreg_full_score(x, *prob); };
  t.log_density_unnormalized = [prob](const Vector& x) { return logreg_log_joint(x, *prob); };
  t.stochastic_score = [prob](const Vector& x, std::uint64_t k) -> Vector { return logreg_score(x, *prob, k); };
  return t;
}

inline TargetModel logreg_target(const LogRegProblem& prob) {
  return logreg_target(std::make_shared<const LogRegProblem>(prob));
}

}  // namespace coinsamp
