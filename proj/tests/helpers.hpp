#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "acadmm/problem.hpp"

namespace testutil {

using acadmm::DenseMatrix;
using acadmm::DenseVector;

inline DenseVector vec(std::initializer_list<double> xs) {
  DenseVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline DenseMatrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double density = 1.0) {
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DenseMatrix m = DenseMatrix::Zero(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (u(rng) < density) m(i, j) = n(rng);
  return m;
}

inline DenseVector random_vector(std::mt19937_64& rng, Eigen::Index n, double sd = 1.0) {
  std::normal_distribution<double> d(0.0, sd);
  DenseVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

// Golden-section search for a unimodal scalar function on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Cyclic coordinate descent with golden-section line minimization; a slow,
// derivative-free reference minimizer of a convex function.
inline DenseVector coordinate_golden_min(const std::function<double(const DenseVector&)>& f, DenseVector x,
                                         double radius, int sweeps = 200) {
  for (int s = 0; s < sweeps; ++s) {
    const DenseVector before = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const auto line = [&](double t) {
        DenseVector y = x;
        y[j] = t;
        return f(y);
      };
      x[j] = golden_min(line, x[j] - radius, x[j] + radius);
    }
    if ((x - before).norm() < 1e-13) break;
  }
  return x;
}

inline acadmm::WorkerShard dense_shard(const DenseMatrix& d, const std::vector<double>& targets) {
  return {acadmm::SparseMatrix::from_dense(d), targets};
}

}  // namespace testutil
