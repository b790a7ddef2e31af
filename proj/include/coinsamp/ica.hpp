#pragma once

// Bayesian ICA: observations x = W^{-1} s with i.i.d. sources, N(0, 1) prior
// on the entries of the unmixing matrix W. Particles hold W flattened row-major.

#include <Eigen/LU>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "coinsamp/rng.hpp"
#include "coinsamp/targets.hpp"

namespace coinsamp {

struct IcaProblem {
  Eigen::Index p = 0;
  Matrix w_true;
  /// One observation per row (n x p).
  Matrix data;
  /// Sources used to generate `data` (n x p); empty when loaded from disk.
  Matrix sources;
  std::uint64_t seed = 0;
  /// Use +tanh in the score, i.e. p_s ∝ cosh; default is the sech source law.
  bool cosh_convention = false;

  Eigen::Index n() const { return data.rows(); }
};

inline double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

/// Draws from the hyperbolic secant law with density sech(s) / pi.
inline double sample_sech(Engine& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double v;
  do {
    v = u(rng);
  } while (v <= 0.0);
  return std::log(std::tan(0.5 * std::numbers::pi * v));
}

/// Builds a problem with data rows x = W_true^{-1} s for the given sources.
inline IcaProblem ica_problem(const Matrix& w_true, const Matrix& sources) {
  detail::require(w_true.rows() == w_true.cols() && sources.cols() == w_true.rows(),
                  "ica_problem: dimension mismatch");
  Eigen::FullPivLU<Matrix> lu(w_true);
  if (!lu.isInvertible()) throw SingularMatrix("ica_problem: W_true is singular");
  IcaProblem prob;
  prob.p = w_true.rows();
  prob.w_true = w_true;
  prob.sources = sources;
  prob.data = (lu.solve(sources.transpose())).transpose();
  return prob;
}

inline IcaProblem ica_generate(Eigen::Index p, Eigen::Index n, std::uint64_t seed) {
  detail::require(p >= 1 && n >= 1, "ica_generate: need p >= 1 and n >= 1");
  Engine w_rng = make_engine(seed, "ica.unmixing");
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix w(p, p);
  do {
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j) w(i, j) = n01(w_rng);
  } while (!(condition_number(w) < 1e6));
  Engine s_rng = make_engine(seed, "ica.sources");
  Matrix s(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) s(i, j) = sample_sech(s_rng);
  IcaProblem prob = ica_problem(w, s);
  prob.seed = seed;
  return prob;
}

/// Full-data posterior score in W:
///   sum_rows [W^{-T} - tanh(W x) x^T] - W.
inline Matrix ica_score(const Matrix& w, const IcaProblem& prob) {
  detail::require(w.rows() == prob.p && w.cols() == prob.p, "ica_score: dimension mismatch");
  Eigen::FullPivLU<Matrix> lu(w);
  if (!lu.isInvertible()) throw SingularMatrix("ica_score: W is singular");
  const double sign = prob.cosh_convention ? 1.0 : -1.0;
  const Matrix y = prob.data * w.transpose();  // rows are (W x_i)^T
  const Matrix t = y.array().tanh().matrix();
  Matrix g = static_cast<double>(prob.n()) * lu.inverse().transpose();
  g += sign * t.transpose() * prob.data;
  g -= w;
  return g;
}

/// log|det W| n + sum log p_s(W x) - |W|_F^2 / 2, up to a constant.
inline double ica_log_posterior(const Matrix& w, const IcaProblem& prob) {
  Eigen::FullPivLU<Matrix> lu(w);
  if (!lu.isInvertible()) throw SingularMatrix("ica_log_posterior: W is singular");
  const Matrix y = prob.data * w.transpose();
  double log_src = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double a = std::abs(y.data()[i]);
    const double log_cosh = a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
    log_src += prob.cosh_convention ? log_cosh : -log_cosh;
  }
  return static_cast<double>(prob.n()) * std::log(std::abs(lu.determinant())) + log_src -
         0.5 * w.squaredNorm();
}

inline Matrix unflatten_square(const Eigen::Ref<const Vector>& v, Eigen::Index p) {
  detail::require(v.size() == p * p, "unflatten_square: size mismatch");
  Matrix m(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = v[i * p + j];
  return m;
}

inline Vector flatten_square(const Matrix& m) {
  const Eigen::Index p = m.rows();
  Vector v(p * p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) v[i * p + j] = m(i, j);
  return v;
}

inline TargetModel ica_target(std::shared_ptr<const IcaProblem> prob) {
  TargetModel t;
  t.name = "ica";
  const Eigen::Index p = prob->p;
  t.dim = static_cast<std::size_t>(p * p);
  t.score = [prob, p](const Vector& x) -> Vector { return flatten_square(ica_score(unflatten_square(x, p), *prob)); };
  t.log_density_unnormalized = [prob, p](const Vector& x) {
    return ica_log_posterior(unflatten_square(x, p), *prob);
  };
  return t;
}

inline TargetModel ica_target(const IcaProblem& prob) {
  return ica_target(std::make_shared<const IcaProblem>(prob));
}

}  // namespace coinsamp
