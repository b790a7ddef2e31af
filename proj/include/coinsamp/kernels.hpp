#pragma once

#include <algorithm>
#include <cmath>
#include <variant>
#include <vector>

#include "coinsamp/types.hpp"

namespace coinsamp {

/// Gaussian RBF kernel k(x, y) = exp(-|x - y|^2 / h).
struct RbfKernel {
  double h = 1.0;
};

/// Inverse multi-quadric kernel k(x, y) = (c^2 + |x - y|^2)^beta.
struct ImqKernel {
  double c = 1.0;
  double beta = -0.5;
};

using KernelSpec = std::variant<RbfKernel, ImqKernel>;

inline void validate(const RbfKernel& k) {
  detail::require(k.h > 0.0 && std::isfinite(k.h), "RBF bandwidth must be positive");
}

inline void validate(const ImqKernel& k) {
  detail::require(k.c > 0.0 && std::isfinite(k.c), "IMQ c must be positive");
  detail::require(k.beta > -1.0 && k.beta < 0.0, "IMQ beta must lie in (-1, 0)");
}

inline void validate(const KernelSpec& k) {
  std::visit([](const auto& kk) { validate(kk); }, k);
}

/// Radial profile phi(u) with u = |x - y|^2 and its first three derivatives.
struct RadialProfile {
  double phi, d1, d2, d3;
};

inline RadialProfile profile(const RbfKernel& k, double u) {
  const double v = std::exp(-u / k.h);
  const double ih = 1.0 / k.h;
  return {v, -v * ih, v * ih * ih, -v * ih * ih * ih};
}

inline RadialProfile profile(const ImqKernel& k, double u) {
  const double b = k.c * k.c + u;
  const double v = std::pow(b, k.beta);
  const double p1 = k.beta * v / b;
  const double p2 = (k.beta - 1.0) * p1 / b;
  const double p3 = (k.beta - 2.0) * p2 / b;
  return {v, p1, p2, p3};
}

inline RadialProfile profile(const KernelSpec& k, double u) {
  return std::visit([u](const auto& kk) { return profile(kk, u); }, k);
}

struct RbfValue {
  double value;
  Vector grad1;
};

/// RBF value and gradient in the first argument.
inline RbfValue rbf_eval(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                         double h) {
  detail::require(h > 0.0 && std::isfinite(h), "rbf_eval: bandwidth must be positive");
  detail::require(x.size() == y.size(), "rbf_eval: dimension mismatch");
  const Vector z = x - y;
  const double v = std::exp(-z.squaredNorm() / h);
  return {v, (-2.0 / h) * v * z};
}

struct ImqValue {
  double value;
  Vector grad1;
  Vector grad2;
  /// sum_j d^2 k / dx_j dy_j
  double trace_grad12;
};

inline ImqValue imq_eval(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                         double c = 1.0, double beta = -0.5) {
  validate(ImqKernel{c, beta});
  detail::require(x.size() == y.size(), "imq_eval: dimension mismatch");
  const Vector z = x - y;
  const double r2 = z.squaredNorm();
  const auto p = profile(ImqKernel{c, beta}, r2);
  const double d = static_cast<double>(x.size());
  Vector g1 = 2.0 * p.d1 * z;
  Vector g2 = -g1;
  return {p.phi, std::move(g1), std::move(g2), -2.0 * d * p.d1 - 4.0 * p.d2 * r2};
}

/// Value of either radial kernel.
inline double kernel_value(const KernelSpec& k, const Eigen::Ref<const Vector>& x,
                           const Eigen::Ref<const Vector>& y) {
  return profile(k, (x - y).squaredNorm()).phi;
}

/// Gram matrix K_ij = k(x_i, x_j) over the rows of `points`.
inline Matrix gram_matrix(const KernelSpec& k, const Eigen::Ref<const Matrix>& points) {
  const Eigen::Index n = points.rows();
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = profile(k, (points.row(i) - points.row(j)).squaredNorm()).phi;
  return g;
}

/// Median of the squared pairwise distances (i < j), divided by log(N + 1).
/// An even count takes the mean of the two central values.
inline double median_bandwidth(const Eigen::Ref<const Matrix>& particles) {
  const Eigen::Index n = particles.rows();
  detail::require(n >= 2, "median_bandwidth: need at least two particles");
  std::vector<double> d2;
  d2.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d2.push_back((particles.row(i) - particles.row(j)).squaredNorm());
  const std::size_t m = d2.size();
  const std::size_t mid = m / 2;
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
  double med = d2[mid];
  if (m % 2 == 0) {
    const double lower = *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid));
    med = 0.5 * (med + lower);
  }
  if (!(med > 0.0)) throw DegenerateEnsemble("median_bandwidth: all particles coincide");
  return med / std::log(static_cast<double>(n) + 1.0);
}

/// Median bandwidth, substituting h = 1 for degenerate or single-particle ensembles.
inline double median_bandwidth_or_unit(const Eigen::Ref<const Matrix>& particles) {
  if (particles.rows() < 2) return 1.0;
  try {
    return median_bandwidth(particles);
  } catch (const DegenerateEnsemble&) {
    return 1.0;
  }
}

}  // namespace coinsamp
