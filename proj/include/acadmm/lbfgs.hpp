#pragma once

#include <functional>

#include "acadmm/types.hpp"

namespace acadmm {

struct LbfgsOptions {
  int memory = 10;
  int max_iters = 500;
  // Stop once |grad| <= grad_tol.
  double grad_tol = 1e-10;
  // Strong Wolfe constants.
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 40;
};

struct LbfgsResult {
  DenseVector x;
  double value = 0.0;
  double grad_norm = 0.0;
  double initial_grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Returns f(x) and writes the gradient.
using SmoothObjective = std::function<double(const DenseVector& x, DenseVector& grad)>;

// Limited-memory BFGS with a strong-Wolfe bracketing line search. Near the
// optimum, where function differences drop below rounding, the sufficient
// decrease test falls back to the approximate-Wolfe form (gradient only).
LbfgsResult minimize_lbfgs(const SmoothObjective& f, DenseVector x0, const LbfgsOptions& opt);

}  // namespace acadmm
