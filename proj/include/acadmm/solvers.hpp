#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>

#include "acadmm/problem.hpp"
#include "acadmm/types.hpp"

namespace acadmm {

struct InnerSolverConfig {
  double tolerance = 1e-10;
  int max_inner_iters = 500;
  bool warm_start = true;

  void validate() const;
};

struct SolveInfo {
  int iterations = 0;
  // Loss-specific optimality certificate: normal-equation residual (enet),
  // gradient norm (logistic), duality gap (svm).
  double certificate = 0.0;
  // Budget exhausted before the certificate reached its target.
  bool warning = false;
};

struct SubproblemResult {
  DenseVector u;
  SolveInfo info;
};

// Factorization of D^T D + tau I, or of D D^T + tau I when the shard has
// fewer samples than features (solved through the Woodbury identity).
// Valid only while tau_tag matches the worker's current penalty.
class FactorizationCache {
 public:
  bool valid_for(double tau) const noexcept { return built_ && tau_tag_ == tau; }
  double tau_tag() const noexcept { return tau_tag_; }
  bool woodbury() const noexcept { return woodbury_; }
  int rebuilds() const noexcept { return rebuilds_; }

  void build(const WorkerShard& shard, double tau);
  // (D^T D + tau I)^{-1} rhs
  DenseVector solve(const WorkerShard& shard, const DenseVector& rhs) const;
  const DenseVector& dtc() const noexcept { return dtc_; }

 private:
  bool built_ = false;
  bool woodbury_ = false;
  double tau_tag_ = 0.0;
  int rebuilds_ = 0;
  Eigen::LLT<DenseMatrix> llt_;
  DenseVector dtc_;
};

// Dual coordinate ascent state kept across outer iterations: alpha_j in
// [0, C] and w = sum_j alpha_j c_j D_j.
struct SvmDualState {
  std::vector<double> alpha;
  DenseVector w;
  std::vector<std::size_t> order;
  std::uint64_t seed = 0;
};

// Worker-confined solver state.
struct SubproblemCache {
  FactorizationCache factor;
  SvmDualState svm;
};

// Every u-subproblem is min_u f_i(u) + tau/2 |v - u + lambda/tau|^2.
SubproblemResult solve_u_enet(const WorkerShard& shard, const DenseVector& v, const DenseVector& lambda, double tau,
                              FactorizationCache& cache);

SubproblemResult solve_u_logistic(const WorkerShard& shard, const DenseVector& v, const DenseVector& lambda,
                                  double tau, const InnerSolverConfig& cfg, const DenseVector* warm = nullptr);

SubproblemResult solve_u_svm(const WorkerShard& shard, const DenseVector& v, const DenseVector& lambda, double tau,
                             double c, const InnerSolverConfig& cfg, SvmDualState& dual);

// Primal and dual values of the svm substep for a given alpha.
struct SvmGap {
  double primal = 0.0;
  double dual = 0.0;
};
SvmGap svm_substep_gap(const WorkerShard& shard, const DenseVector& z, double tau, double c,
                       const SvmDualState& dual);

// argmin_v g(v) + sigma/2 |v - w|^2
DenseVector prox_regularizer(const DenseVector& w, double sigma, const Regularizer& reg);

}  // namespace acadmm
