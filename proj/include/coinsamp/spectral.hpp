#pragma once

// One-dimensional spectral kernel k_L(x, y) = sum_i phi_i(x) phi_i(y) / lambda_i
// built from a finite-difference discretization of the Langevin generator
// L f = f'' - U' f'. The kernel inverts -L on functions with zero pi-mean.

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "coinsamp/types.hpp"

namespace coinsamp {

class SpectralKernelTable {
 public:
  SpectralKernelTable() = default;

  /// `eigenfunctions` is m x n (one mode per row, values at the grid nodes);
  /// `weights` are the discrete stationary probabilities of the nodes.
  SpectralKernelTable(double lo, double hi, Vector eigenvalues, Matrix eigenfunctions,
                      Vector weights)
      : lo_(lo), hi_(hi), eigenvalues_(std::move(eigenvalues)),
        eigenfunctions_(std::move(eigenfunctions)), weights_(std::move(weights)) {
    detail::require(lo_ < hi_, "SpectralKernelTable: empty grid range");
    detail::require(eigenfunctions_.cols() >= 2, "SpectralKernelTable: need at least two nodes");
    detail::require(eigenvalues_.size() == eigenfunctions_.rows(),
                    "SpectralKernelTable: eigenvalue/eigenfunction count mismatch");
    detail::require(weights_.size() == eigenfunctions_.cols(),
                    "SpectralKernelTable: weight/node count mismatch");
    for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i)
      detail::require(eigenvalues_[i] > 0.0, "SpectralKernelTable: eigenvalues must be positive");
    spacing_ = (hi_ - lo_) / static_cast<double>(eigenfunctions_.cols() - 1);
    inv_eigenvalues_ = eigenvalues_.cwiseInverse();
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double spacing() const { return spacing_; }
  Eigen::Index nodes() const { return eigenfunctions_.cols(); }
  Eigen::Index modes() const { return eigenvalues_.size(); }
  double node(Eigen::Index k) const { return lo_ + spacing_ * static_cast<double>(k); }
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenfunctions() const { return eigenfunctions_; }
  const Vector& weights() const { return weights_; }
  bool contains(double x) const { return x >= lo_ && x <= hi_; }

  /// Locates the interpolation cell of x; out-of-range points clamp to the
  /// boundary and bump `clamped` when given.
  struct Cell {
    Eigen::Index k;
    double t;
  };
  Cell locate(double x, std::size_t* clamped = nullptr) const {
    if (!contains(x)) {
      if (clamped != nullptr) ++*clamped;
      x = std::clamp(x, lo_, hi_);
    }
    const double s = (x - lo_) / spacing_;
    auto k = static_cast<Eigen::Index>(std::floor(s));
    k = std::clamp<Eigen::Index>(k, 0, nodes() - 2);
    return {k, s - static_cast<double>(k)};
  }

  /// phi_i(x) for all modes, linearly interpolated.
  Vector modes_at(double x, std::size_t* clamped = nullptr) const {
    const Cell c = locate(x, clamped);
    return (1.0 - c.t) * eigenfunctions_.col(c.k) + c.t * eigenfunctions_.col(c.k + 1);
  }

  /// Slope of the piecewise-linear interpolant of every mode at x.
  Vector mode_slopes_at(double x, std::size_t* clamped = nullptr) const {
    const Cell c = locate(x, clamped);
    return (eigenfunctions_.col(c.k + 1) - eigenfunctions_.col(c.k)) / spacing_;
  }

  double value(double x, double y, std::size_t* clamped = nullptr) const {
    return modes_at(x, clamped).cwiseProduct(inv_eigenvalues_).dot(modes_at(y, clamped));
  }

  /// d k_L(x, y) / dx.
  double grad1(double x, double y, std::size_t* clamped = nullptr) const {
    return mode_slopes_at(x, clamped).cwiseProduct(inv_eigenvalues_).dot(modes_at(y, clamped));
  }

  const Vector& inverse_eigenvalues() const { return inv_eigenvalues_; }

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  double spacing_ = 1.0;
  Vector eigenvalues_;
  Vector inv_eigenvalues_;
  Matrix eigenfunctions_;
  Vector weights_;
};

/// Builds the spectral table for pi ∝ exp(-U) on n equally spaced nodes over
/// [lo, hi], keeping the m smallest nonzero eigenvalues of -L.
///
/// Interior rows use central differences; the two end rows couple only to
/// their inward neighbour with zero row sum (no-flux). The resulting
/// tridiagonal matrix has positive off-diagonals and satisfies detailed
/// balance, so the diagonal similarity D with (d_{i+1}/d_i)^2 = A_{i,i+1}/A_{i+1,i}
/// (the discrete analogue of sqrt(pi)) makes it symmetric. The node weights
/// d_i^2 / sum d^2 are the discrete stationary law and eigenfunctions are
/// orthonormal under them.
inline SpectralKernelTable build_spectral_kernel(const std::function<double(double)>& potential_grad,
                                                 double lo, double hi, Eigen::Index n_nodes,
                                                 Eigen::Index m) {
  detail::require(lo < hi && std::isfinite(lo) && std::isfinite(hi),
                  "build_spectral_kernel: need lo < hi");
  detail::require(m >= 1 && n_nodes >= m + 1 && n_nodes >= 3,
                  "build_spectral_kernel: need n_nodes >= m + 1 >= 2");
  const Eigen::Index n = n_nodes;
  const double dx = (hi - lo) / static_cast<double>(n - 1);
  const double inv_dx2 = 1.0 / (dx * dx);

  Vector up(n - 1), down(n - 1);  // up[i] = A(i, i+1), down[i] = A(i+1, i)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double g = potential_grad(lo + dx * static_cast<double>(i));
    if (!std::isfinite(g)) throw SpectralFailure("build_spectral_kernel: non-finite potential gradient");
    if (i + 1 < n) up[i] = inv_dx2 - g / (2.0 * dx);
    if (i > 0) down[i - 1] = inv_dx2 + g / (2.0 * dx);
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (!(up[i] > 0.0) || !(down[i] > 0.0))
      throw SpectralFailure("build_spectral_kernel: grid too coarse for the potential gradient");

  Vector diag(n), off(n - 1), log_d(n);
  log_d[0] = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    log_d[i + 1] = log_d[i] + 0.5 * (std::log(up[i]) - std::log(down[i]));
    off[i] = -std::sqrt(up[i] * down[i]);  // sign flipped: we diagonalize -A
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = (i + 1 < n ? up[i] : 0.0) + (i > 0 ? down[i - 1] : 0.0);
    diag[i] = a;
  }

  // Smallest m + 1 eigenpairs of the symmetric tridiagonal -S.
  const lapack_int count = static_cast<lapack_int>(m + 1);
  std::vector<double> evals(static_cast<std::size_t>(n));
  Matrix evecs(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  Vector work_diag = diag;
  Vector work_off(n);
  work_off.head(n - 1) = off;
  work_off[n - 1] = 0.0;
  const lapack_int info = LAPACKE_dstevr(
      LAPACK_COL_MAJOR, 'V', 'I', static_cast<lapack_int>(n), work_diag.data(), work_off.data(),
      0.0, 0.0, 1, count, 0.0, &found, evals.data(), evecs.data(), static_cast<lapack_int>(n),
      support.data());
  if (info != 0 || found != count)
    throw SpectralFailure("build_spectral_kernel: eigensolver did not converge");

  const double shift = log_d.maxCoeff();
  Vector d = (log_d.array() - shift).exp().matrix();
  const double mass = d.squaredNorm();
  Vector weights = d.array().square().matrix() / mass;

  // Index 0 is the constant mode (eigenvalue ~ 0); keep the next m.
  Vector eigenvalues = Eigen::Map<const Vector>(evals.data() + 1, m);
  Matrix eigenfunctions(m, n);
  const double scale = std::sqrt(mass);
  for (Eigen::Index i = 0; i < m; ++i) {
    Vector v = evecs.col(i + 1);
    // Fix signs so the table is reproducible: positive at the densest node.
    Eigen::Index peak;
    weights.maxCoeff(&peak);
    Eigen::Index ref = peak;
    if (std::abs(v[ref]) < 1e-12) {
      v.cwiseAbs().maxCoeff(&ref);
    }
    if (v[ref] < 0.0) v = -v;
    eigenfunctions.row(i) = (v.array() / d.array()).matrix().transpose() * scale;
  }
  if (!(eigenvalues.minCoeff() > 0.0))
    throw SpectralFailure("build_spectral_kernel: non-positive retained eigenvalue");
  return {lo, hi, std::move(eigenvalues), std::move(eigenfunctions), std::move(weights)};
}

inline double spectral_grad1(const SpectralKernelTable& table, double x, double y,
                             std::size_t* clamped = nullptr) {
  return table.grad1(x, y, clamped);
}

}  // namespace coinsamp
