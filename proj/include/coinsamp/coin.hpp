#pragma once

// Coin-betting update rules. Each state object owns one bettor: the KT bettor
// for plain online optimization, and two Wasserstein variants that move a
// single particle from its origin x0 (known gradient bound, and adaptive
// per-coordinate bounds).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>

#include "coinsamp/types.hpp"

namespace coinsamp {

/// Krichevsky-Trofimov coin bettor on R^d.
///
/// Round t bets x_t = -(sum_{i<t} g_i / t) * (eps - sum_{i<t} <g_i, x_i>).
/// `bet()` is the current x_t; `step(g)` records the subgradient observed at
/// x_t and returns x_{t+1}.
class KTBettor {
 public:
  explicit KTBettor(std::size_t dim, double epsilon = 1.0)
      : epsilon_(epsilon), grad_sum_(Vector::Zero(dim)), bet_(Vector::Zero(dim)) {
    detail::require(epsilon > 0.0 && std::isfinite(epsilon), "KTBettor: epsilon must be positive");
  }

  const Vector& step(const Eigen::Ref<const Vector>& g) {
    detail::require(g.size() == grad_sum_.size(), "KTBettor: dimension mismatch");
    require_finite(g, "KTBettor::step");
    payoff_sum_ += g.dot(bet_);
    grad_sum_ += g;
    ++t_;
    bet_ = -(grad_sum_ / static_cast<double>(t_)) * (epsilon_ - payoff_sum_);
    return bet_;
  }

  const Vector& bet() const { return bet_; }
  /// eps - sum <g_i, x_i>; stays >= 0 for outcomes with |g| <= 1.
  double wealth() const { return epsilon_ - payoff_sum_; }
  std::size_t round() const { return t_; }
  double epsilon() const { return epsilon_; }
  const Vector& grad_sum() const { return grad_sum_; }
  double payoff_sum() const { return payoff_sum_; }

 private:
  double epsilon_;
  Vector grad_sum_;
  double payoff_sum_ = 0.0;
  std::size_t t_ = 1;
  Vector bet_;
};

/// Coin Wasserstein gradient descent for one particle with a known bound L:
///   x_t = x0 - (sum_{s<t} g_s)/(L t) * (w0 - sum_{s<t} <g_s / L, x_s - x0>).
/// Round 1 emits x0. `step(g)` takes the gradient at the current position and
/// returns the next one.
class CoinWgd {
 public:
  CoinWgd(Vector x0, double bound, double w0 = 1.0)
      : x0_(std::move(x0)), grad_sum_(Vector::Zero(x0_.size())), w0_(w0), bound_(bound),
        x_(x0_) {
    detail::require(bound > 0.0 && std::isfinite(bound), "CoinWgd: L must be positive");
    detail::require(w0 > 0.0 && std::isfinite(w0), "CoinWgd: w0 must be positive");
    require_finite(x0_, "CoinWgd: x0");
  }

  const Vector& step(const Eigen::Ref<const Vector>& grad) {
    detail::require(grad.size() == x0_.size(), "CoinWgd: dimension mismatch");
    require_finite(grad, "CoinWgd::step");
    // Wealth accumulates outcomes c_s = -g_s / L against bets x_s - x0.
    wealth_ -= grad.dot(x_ - x0_) / bound_;
    grad_sum_ += grad;
    ++t_;
    x_ = x0_ - grad_sum_ / (bound_ * static_cast<double>(t_)) * wealth_;
    return x_;
  }

  const Vector& position() const { return x_; }
  const Vector& origin() const { return x0_; }
  double wealth() const { return wealth_; }
  double bound() const { return bound_; }
  std::size_t round() const { return t_; }

 private:
  Vector x0_;
  Vector grad_sum_;
  double w0_;
  double bound_;
  double wealth_ = w0_;
  std::size_t t_ = 1;
  Vector x_;
};

/// Coin Wasserstein gradient descent with per-coordinate adaptive gradient
/// bounds. With c = -grad, for each coordinate j (in this order):
///   Lmax_j <- max(Lmax_j, |c_j|);  G_j <- G_j + |c_j|;
///   R_j <- max(R_j + c_j (x_prev_j - x0_j), 0);
///   x_j = x0_j + (sum c_j) / D_j * (1 + R_j / Lmax_j),
/// with D_j = G_j + Lmax_j, floored at alpha * Lmax_j when alpha is set.
/// A coordinate that has only seen zero gradients stays at x0_j.
class AdaptiveCoin {
 public:
  static constexpr double kDefaultAlpha = 100.0;

  explicit AdaptiveCoin(Vector x0, std::optional<double> alpha = std::nullopt)
      : x0_(std::move(x0)),
        c_sum_(Vector::Zero(x0_.size())),
        abs_sum_(Vector::Zero(x0_.size())),
        max_scale_(Vector::Zero(x0_.size())),
        reward_(Vector::Zero(x0_.size())),
        alpha_(alpha),
        x_(x0_) {
    require_finite(x0_, "AdaptiveCoin: x0");
    if (alpha_) detail::require(*alpha_ >= 1.0 && std::isfinite(*alpha_), "AdaptiveCoin: alpha must be >= 1");
  }

  const Vector& step(const Eigen::Ref<const Vector>& grad) {
    detail::require(grad.size() == x0_.size(), "AdaptiveCoin: dimension mismatch");
    require_finite(grad, "AdaptiveCoin::step");
    for (Eigen::Index j = 0; j < x0_.size(); ++j) {
      const double c = -grad[j];
      const double a = std::abs(c);
      max_scale_[j] = std::max(max_scale_[j], a);
      abs_sum_[j] += a;
      reward_[j] = std::max(reward_[j] + c * (x_[j] - x0_[j]), 0.0);
      c_sum_[j] += c;
      if (max_scale_[j] == 0.0) {
        x_[j] = x0_[j];
        continue;
      }
      double denom = abs_sum_[j] + max_scale_[j];
      if (alpha_) denom = std::max(denom, *alpha_ * max_scale_[j]);
      x_[j] = x0_[j] + c_sum_[j] / denom * (1.0 + reward_[j] / max_scale_[j]);
    }
    ++t_;
    return x_;
  }

  const Vector& position() const { return x_; }
  const Vector& origin() const { return x0_; }
  const Vector& max_scale() const { return max_scale_; }
  const Vector& abs_grad_sum() const { return abs_sum_; }
  const Vector& reward() const { return reward_; }
  const Vector& outcome_sum() const { return c_sum_; }
  std::optional<double> alpha() const { return alpha_; }
  std::size_t round() const { return t_; }

 private:
  Vector x0_;
  Vector c_sum_;
  Vector abs_sum_;
  Vector max_scale_;
  Vector reward_;
  std::optional<double> alpha_;
  std::size_t t_ = 1;
  Vector x_;
};

// Free-function spellings of the three update rules.

inline Vector kt_step(KTBettor& state, const Eigen::Ref<const Vector>& g) { return state.step(g); }

inline Vector coin_wgd_step(CoinWgd& state, const Eigen::Ref<const Vector>& grad) {
  return state.step(grad);
}

inline Vector adaptive_coin_step(AdaptiveCoin& state, const Eigen::Ref<const Vector>& grad) {
  return state.step(grad);
}

}  // namespace coinsamp
