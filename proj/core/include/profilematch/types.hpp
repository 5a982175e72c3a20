#pragma once

#include <cstddef>
#include <stdexcept>

#include <Eigen/Dense>

namespace profilematch {

// Dense row-major storage; rows are points / profiles / sources.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Malformed or out-of-contract input: non-finite values, bad ranges, bad files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Shapes that must agree do not (n != m, dimension mismatch).
class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

// Per-call execution knobs. Outputs never depend on `threads`.
struct ExecutionOptions {
  unsigned threads = 1;
};

}  // namespace profilematch
