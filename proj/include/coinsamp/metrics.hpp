#pragma once

#include <Eigen/LU>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "coinsamp/kernels.hpp"
#include "coinsamp/logreg.hpp"
#include "coinsamp/parallel.hpp"
#include "coinsamp/stein.hpp"
#include "coinsamp/types.hpp"

namespace coinsamp {

struct MetricReport {
  std::string name;
  double value = 0.0;
  std::size_t n_samples = 0;
  std::map<std::string, double> params;
};

/// V-statistic (1/N^2) sum_{i,j} k_pi(x_i, x_j) from precomputed scores.
inline double ksd_squared(const Eigen::Ref<const Matrix>& particles, const Eigen::Ref<const Matrix>& scores,
                          const KernelSpec& base, std::size_t threads = 1) {
  detail::require(particles.rows() >= 1, "ksd: need at least one particle");
  detail::require(scores.rows() == particles.rows() && scores.cols() == particles.cols(),
                  "ksd: scores do not match particles");
  const Eigen::Index n = particles.rows();
  Vector row_sums(n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      acc += stein_kernel_terms(particles.row(i).transpose(), particles.row(j).transpose(), scores.row(i).transpose(),
                                scores.row(j).transpose(), base)
                 .value;
    row_sums[i] = acc;
  });
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += row_sums[i];
  return total / (static_cast<double>(n) * static_cast<double>(n));
}

/// sqrt of the V-statistic; a negative sum (roundoff) is clamped to zero and
/// reported through `clamped`.
inline double ksd(const Eigen::Ref<const Matrix>& particles, const Eigen::Ref<const Matrix>& scores,
                  const KernelSpec& base, bool* clamped = nullptr, std::size_t threads = 1) {
  const double sq = ksd_squared(particles, scores, base, threads);
  if (clamped != nullptr) *clamped = sq < 0.0;
  return std::sqrt(std::max(sq, 0.0));
}

/// IMQ-kernel KSD with the score evaluated at each particle.
inline double ksd(const Eigen::Ref<const Matrix>& particles, const std::function<Vector(const Vector&)>& score,
                  double imq_c = 1.0, double imq_beta = -0.5, bool* clamped = nullptr, std::size_t threads = 1) {
  Matrix s(particles.rows(), particles.cols());
  for (Eigen::Index i = 0; i < particles.rows(); ++i) s.row(i) = score(particles.row(i).transpose()).transpose();
  return ksd(particles, s, ImqKernel{imq_c, imq_beta}, clamped, threads);
}

namespace detail {

inline double mean_pairwise_distance(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b,
                                     std::size_t threads) {
  Vector row(a.rows());
  parallel_for(static_cast<std::size_t>(a.rows()), threads, [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < b.rows(); ++j) acc += (a.row(i) - b.row(j)).norm();
    row[i] = acc;
  });
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) total += row[i];
  return total / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

}  // namespace detail

/// Energy statistic 2 E|X - Y| - E|X - X'| - E|Y - Y'| over all pairs.
inline double energy_distance(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& y,
                              std::size_t threads = 1) {
  detail::require(x.rows() >= 1 && y.rows() >= 1, "energy_distance: empty sample");
  detail::require(x.cols() == y.cols(), "energy_distance: dimension mismatch");
  return 2.0 * detail::mean_pairwise_distance(x, y, threads) - detail::mean_pairwise_distance(x, x, threads) -
         detail::mean_pairwise_distance(y, y, threads);
}

/// Energy distance against a fixed reference sample; the E|Y - Y'| term is
/// computed once.
class EnergyReference {
 public:
  explicit EnergyReference(Matrix reference, std::size_t threads = 1)
      : ref_(std::move(reference)), threads_(threads) {
    detail::require(ref_.rows() >= 1, "EnergyReference: empty reference sample");
    self_term_ = detail::mean_pairwise_distance(ref_, ref_, threads_);
  }

  double operator()(const Eigen::Ref<const Matrix>& x) const {
    detail::require(x.rows() >= 1 && x.cols() == ref_.cols(), "EnergyReference: sample shape mismatch");
    return 2.0 * detail::mean_pairwise_distance(x, ref_, threads_) -
           detail::mean_pairwise_distance(x, x, threads_) - self_term_;
  }

  const Matrix& reference() const { return ref_; }

 private:
  Matrix ref_;
  std::size_t threads_;
  double self_term_ = 0.0;
};

/// Amari index of P = W_est W_true^{-1}, normalized by 1 / (2p).
inline double amari_distance(const Matrix& w_est, const Matrix& w_true) {
  detail::require(w_est.rows() == w_est.cols() && w_true.rows() == w_true.cols() && w_est.rows() == w_true.rows(),
                  "amari_distance: need square matrices of equal size");
  const Eigen::Index p = w_true.rows();
  detail::require(p >= 1, "amari_distance: empty matrix");
  Eigen::FullPivLU<Matrix> lu(w_true);
  if (!lu.isInvertible()) throw SingularMatrix("amari_distance: W_true is singular");
  const Matrix a = (w_est * lu.inverse()).cwiseAbs();
  double total = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double m = a.row(i).maxCoeff();
    if (!(m > 0.0)) throw InvalidEstimate("amari_distance: W_est W_true^{-1} has a zero row");
    total += a.row(i).sum() / m - 1.0;
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    const double m = a.col(j).maxCoeff();
    if (!(m > 0.0)) throw InvalidEstimate("amari_distance: W_est W_true^{-1} has a zero column");
    total += a.col(j).sum() / m - 1.0;
  }
  return total / (2.0 * static_cast<double>(p));
}

struct LogRegMetrics {
  double accuracy = 0.0;
  double nll = 0.0;
};

/// Probability-averaged predictions over particles theta = [w, log alpha].
/// A predictive probability of exactly 1/2 predicts +1.
inline LogRegMetrics logreg_metrics(const Eigen::Ref<const Matrix>& particles, const Eigen::Ref<const Matrix>& features,
                                    const Eigen::Ref<const Vector>& labels) {
  detail::require(particles.rows() >= 1, "logreg_metrics: no particles");
  detail::require(features.rows() >= 1, "logreg_metrics: empty test set");
  detail::require(labels.size() == features.rows(), "logreg_metrics: label count mismatch");
  const Eigen::Index p = features.cols();
  detail::require(particles.cols() == p + 1 || particles.cols() == p,
                  "logreg_metrics: particle dimension must be p or p + 1");
  const Matrix logits = features * particles.leftCols(p).transpose();  // test points x particles
  LogRegMetrics out;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    double prob = 0.0;
    for (Eigen::Index k = 0; k < logits.cols(); ++k) prob += sigmoid(logits(i, k));
    prob /= static_cast<double>(logits.cols());
    const double y = labels[i];
    detail::require(y == 1.0 || y == -1.0, "logreg_metrics: labels must be -1 or +1");
    const double predicted = prob >= 0.5 ? 1.0 : -1.0;
    if (predicted == y) out.accuracy += 1.0;
    const double p_true = y > 0.0 ? prob : 1.0 - prob;
    out.nll -= std::log(std::max(p_true, 1e-300));
  }
  out.accuracy /= static_cast<double>(features.rows());
  out.nll /= static_cast<double>(features.rows());
  return out;
}

struct Moments {
  Vector mean;
  Matrix covariance;
};

/// Sample mean and unbiased covariance.
inline Moments moments(const Eigen::Ref<const Matrix>& particles) {
  if (particles.rows() < 2) throw InsufficientSamples("moments: need at least two particles for a covariance");
  Moments m;
  m.mean = particles.colwise().mean().transpose();
  const Matrix centered = particles.rowwise() - m.mean.transpose();
  m.covariance = centered.transpose() * centered / static_cast<double>(particles.rows() - 1);
  return m;
}

}  // namespace coinsamp
