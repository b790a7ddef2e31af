#pragma once

#include <optional>

#include "coinsamp/kernels.hpp"

namespace coinsamp {

struct SteinValue {
  double value;
  /// d k_pi / dy; empty when the score Jacobian at y was not supplied.
  Vector grad2;
};

/// Stein kernel
///   k_pi(x, y) = s(x)'s(y) k + s(x)' grad_2 k + grad_1 k' s(y) + div_1 grad_2 k
/// from precomputed scores sx = s(x), sy = s(y) and, for the y-gradient, the
/// score Jacobian jy(a, b) = d s_a / d y_b at y.
inline SteinValue stein_kernel_terms(const Eigen::Ref<const Vector>& x,
                                     const Eigen::Ref<const Vector>& y,
                                     const Eigen::Ref<const Vector>& sx,
                                     const Eigen::Ref<const Vector>& sy, const KernelSpec& base,
                                     const Matrix* jy = nullptr) {
  const Vector z = x - y;
  const double u = z.squaredNorm();
  const double d = static_cast<double>(x.size());
  const auto p = profile(base, u);
  const double ss = sx.dot(sy);
  const Vector ds = sx - sy;
  const double zds = z.dot(ds);

  SteinValue out;
  out.value = ss * p.phi - 2.0 * p.d1 * zds - 2.0 * d * p.d1 - 4.0 * p.d2 * u;
  if (jy != nullptr) {
    const Vector grad1k = 2.0 * p.d1 * z;
    out.grad2 = jy->transpose() * (sx * p.phi + grad1k);
    out.grad2 += (-2.0 * p.d1 * ss) * z;
    out.grad2 += 2.0 * p.d1 * ds;
    out.grad2 += (4.0 * p.d2 * zds) * z;
    out.grad2 += (4.0 * ((d + 2.0) * p.d2 + 2.0 * p.d3 * u)) * z;
  }
  return out;
}

/// Stein kernel with the score (and optionally its Jacobian) evaluated on demand.
template <class Score, class Jacobian>
SteinValue stein_kernel(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                        Score&& score, Jacobian&& score_jacobian, const KernelSpec& base) {
  validate(base);
  detail::require(x.size() == y.size(), "stein_kernel: dimension mismatch");
  const Vector sx = score(x);
  const Vector sy = score(y);
  const Matrix jy = score_jacobian(y);
  return stein_kernel_terms(x, y, sx, sy, base, &jy);
}

template <class Score>
double stein_kernel_value(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                          Score&& score, const KernelSpec& base) {
  validate(base);
  detail::require(x.size() == y.size(), "stein_kernel: dimension mismatch");
  return stein_kernel_terms(x, y, score(x), score(y), base).value;
}

}  // namespace coinsamp
