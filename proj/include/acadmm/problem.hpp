#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "acadmm/sparse.hpp"
#include "acadmm/types.hpp"

namespace acadmm {

enum class LossKind { squared, logistic, hinge };

std::string_view to_string(LossKind k);
LossKind parse_loss_kind(std::string_view s);

enum class RegularizerKind { none, elastic_net, l1, ridge };

// g(v): elastic net rho1*|v|_1 + rho2/2*|v|^2, l1 rho1*|v|_1 (rho2 ignored),
// ridge 1/2*|v|^2, none g = 0.
struct Regularizer {
  RegularizerKind kind = RegularizerKind::none;
  double rho1 = 0.0;
  double rho2 = 0.0;

  static Regularizer none() { return {}; }
  static Regularizer elastic_net(double rho1, double rho2) { return {RegularizerKind::elastic_net, rho1, rho2}; }
  static Regularizer l1(double rho) { return {RegularizerKind::l1, rho, 0.0}; }
  static Regularizer ridge() { return {RegularizerKind::ridge, 0.0, 0.0}; }

  double value(const DenseVector& v) const;
  void validate() const;
};

std::string_view to_string(RegularizerKind k);

// A worker's samples (rows of `data`) and their regression targets or
// {-1, +1} labels.
struct WorkerShard {
  SparseMatrix data;
  std::vector<double> targets;

  std::size_t samples() const noexcept { return data.rows(); }
  std::size_t dimension() const noexcept { return data.cols(); }
};

struct ConsensusProblem {
  std::size_t dimension = 0;
  std::vector<WorkerShard> shards;
  LossKind loss = LossKind::squared;
  Regularizer regularizer;
  double svm_c = 1.0;

  std::size_t nodes() const noexcept { return shards.size(); }

  // Checks every structural invariant; throws InvalidInput.
  void validate() const;
};

// Local loss f_i at u.
double loss_value(const ConsensusProblem& problem, std::size_t node, const DenseVector& u);
// Gradient of f_i at u. For hinge this is the subgradient that picks 0 at
// active margins (margin exactly 1).
DenseVector loss_gradient(const ConsensusProblem& problem, std::size_t node, const DenseVector& u);

// Sum_i f_i(v) + g(v), shards summed in node order.
double evaluate_objective(const ConsensusProblem& problem, const DenseVector& v);

// Iterates at snapshot iteration k0, used for the spectral deltas.
struct AdaptationSnapshot {
  DenseVector u;
  DenseVector lambda;
  DenseVector hat_lambda;
  long k0 = 0;
};

struct WorkerState {
  DenseVector u;
  DenseVector lambda;
  double tau = 1.0;
  std::optional<AdaptationSnapshot> snapshot;
};

struct GlobalState {
  DenseVector v;
  DenseVector v_prev;
  DenseVector v_snapshot;
  long iter = 0;
};

// (|u_i|^2, |lambda_i|^2)
std::pair<double, double> local_norms(const WorkerState& state);

struct NodeResiduals {
  double primal_sq = 0.0;
  double dual_sq = 0.0;
};

struct ResidualReport {
  double primal_sq = 0.0;
  double dual_sq = 0.0;
  std::vector<NodeResiduals> per_node;
  double sum_u_sq = 0.0;
  double n_v_sq = 0.0;
  double sum_lambda_sq = 0.0;

  double primal_scale() const noexcept { return sum_u_sq > n_v_sq ? sum_u_sq : n_v_sq; }
};

}  // namespace acadmm
