#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace acadmm {

// Dense iterate storage: u_i, v, lambda_i and the hat-lambda intermediate.
using DenseVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised when the coordinator/worker message contract is violated.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A worker subproblem failed; carries where it happened so the run can abort
// with a useful message.
class SubproblemError : public std::runtime_error {
 public:
  SubproblemError(std::size_t node, long iteration, const std::string& what)
      : std::runtime_error("node " + std::to_string(node) + ", iteration " +
                           std::to_string(iteration) + ": " + what),
        node_(node),
        iteration_(iteration) {}

  std::size_t node() const noexcept { return node_; }
  long iteration() const noexcept { return iteration_; }

 private:
  std::size_t node_;
  long iteration_;
};

inline bool all_finite(const DenseVector& x) { return x.allFinite(); }

}  // namespace acadmm
