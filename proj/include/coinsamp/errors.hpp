#pragma once

#include <stdexcept>
#include <string>

namespace coinsamp {

/// Bad parameter, precondition violation, or non-finite input.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// All pairwise distances vanish, so no bandwidth can be derived.
class DegenerateEnsemble : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigensolver failure or an unusable finite-difference discretization.
class SpectralFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An estimate that cannot be scored (e.g. an all-zero row in the Amari product).
class InvalidEstimate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace coinsamp
