#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace qhgeo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error taxonomy. Each maps onto a CLI exit status (see cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A point (or quadrature node) lies on or outside the domain boundary.
class ExteriorPointError : public InputError {
 public:
  using InputError::InputError;
};

/// Operation has no implementation for the given norm or domain kind.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

/// No interior initial path could be constructed between two points.
class NoPathError : public Error {
 public:
  using Error::Error;
};

// Deterministic stream splitting: every consumer of randomness derives its
// generator from (seed, stream) so results do not depend on evaluation order
// or thread count.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x51ed270bU};
  return std::mt19937_64(seq);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InputError(what);
}

}  // namespace qhgeo
