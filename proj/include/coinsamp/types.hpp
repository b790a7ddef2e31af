#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "coinsamp/errors.hpp"

namespace coinsamp {

using Vector = Eigen::VectorXd;
/// Particle matrices are N x d: one particle per row.
using Matrix = Eigen::MatrixXd;

inline bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

inline void require_finite(const Eigen::Ref<const Vector>& v, const char* what) {
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite input");
}

}  // namespace coinsamp
