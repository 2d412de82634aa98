#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace varcalc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Absolute row-residual tolerance shared by every membership and active-set test.
inline constexpr double kFeasTol = 1e-9;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
// Point outside the domain an operation requires.
struct DomainError : Error {
  using Error::Error;
};
// Expression evaluation or differentiation failure (kinks, division by zero).
struct EvalError : Error {
  using Error::Error;
};
// Problem data that contradicts itself (empty multiplier set, non-stationary point).
struct InconsistentInput : Error {
  using Error::Error;
};
struct CapacityError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};

inline void require_dim(long got, long want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

}  // namespace varcalc
