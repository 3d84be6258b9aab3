#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace chebfit {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Non-finite data, out-of-domain parameters, malformed specs.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public Error {
 public:
  explicit RankDeficientError(Index column)
      : Error("design matrix is rank deficient at column " +
              std::to_string(column)),
        column_(column) {}

  Index column() const noexcept { return column_; }

 private:
  Index column_;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Outcome of an iterative solve. Infeasible/Unbounded are results, not faults.
enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

template <typename Scalar>
constexpr Scalar infinity() {
  return std::numeric_limits<Scalar>::infinity();
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.size() == 0 || m.allFinite();
}

}  // namespace chebfit
