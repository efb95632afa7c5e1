#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "acadmm/policy.hpp"
#include "acadmm/problem.hpp"
#include "acadmm/solvers.hpp"

namespace acadmm {

struct TauSummary {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct IterationRecord {
  long k = 0;
  ResidualReport residuals;
  std::vector<double> taus;       // tau^k, used by the steps of iteration k
  std::vector<double> next_taus;  // tau^{k+1}; equals taus when nothing adapted
  TauSummary tau;
  double objective = 0.0;
  double h_progress = 0.0;        // |B dv|^2_T + |d lambda|^2_{T^-1}
  double wall_ms = 0.0;
  int inner_warnings = 0;
  std::vector<AdaptationOutcome> adaptation;  // per node on spectral adaptation steps
};

enum class StopReason { converged, max_iterations };
std::string_view to_string(StopReason r);

// Handed to EngineConfig::on_adaptation at every adaptation step of the
// serial engine, after the dual step and before the penalty changes.
struct AdaptationProbe {
  long k;
  std::size_t node;
  const WorkerState& state;  // u^k, lambda^k, tau^k
  const DenseVector& hat_lambda;
  const AdaptationDeltas& deltas;
};

struct EngineConfig {
  double tol = 1e-5;
  long maxiter = 1000;
  double tau0 = 1.0;
  PolicyConfig policy;
  InnerSolverConfig inner;
  std::uint64_t seed = 0;
  bool record_wall_clock = true;
  std::function<void(const AdaptationProbe&)> on_adaptation;

  void validate() const;
};

struct RunResult {
  DenseVector v;
  std::vector<IterationRecord> records;
  StopReason reason = StopReason::max_iterations;
  std::vector<WorkerState> workers;

  long iterations() const noexcept { return static_cast<long>(records.size()); }
};

// ---- step primitives shared by the serial engine and the parallel runtime ----

// u^{k+1} for one node from (v^k, lambda^k, tau^k); worker.u is the warm start.
SubproblemResult u_step(const ConsensusProblem& problem, std::size_t node, const WorkerState& worker,
                        const DenseVector& v, SubproblemCache& cache, const InnerSolverConfig& inner);

// tau_i u_i - lambda_i, the piece each worker contributes to the v-update.
DenseVector weighted_contribution(const DenseVector& u, const DenseVector& lambda, double tau);

// v = prox_g(w, sigma), sigma = sum tau_i, w = sum (tau_i u_i - lambda_i) / sigma.
DenseVector v_step(std::span<const DenseVector> u, std::span<const DenseVector> lambda, std::span<const double> tau,
                   const Regularizer& reg);
DenseVector v_step_from_weighted(std::span<const DenseVector> weighted, std::span<const double> tau,
                                 const Regularizer& reg);

// lambda + tau (v_new - u), with worker.u holding u^{k+1}.
DenseVector dual_step(const WorkerState& worker, const DenseVector& v_new);

// lambda^{k-1} + tau^k (v^{k-1} - u^k)
DenseVector hat_lambda(const DenseVector& lambda_prev, double tau, const DenseVector& v_prev, const DenseVector& u);

struct LocalNorms {
  double u_sq = 0.0;
  double lambda_sq = 0.0;
  double r_sq = 0.0;  // |v - u_i|^2
  double d_sq = 0.0;  // |tau_i (v_prev - v)|^2
};

LocalNorms local_residual_norms(const WorkerState& state, const DenseVector& v, const DenseVector& v_prev);
ResidualReport assemble_residuals(std::span<const LocalNorms> nodes, const DenseVector& v);
ResidualReport compute_residuals(std::span<const WorkerState> states, const DenseVector& v,
                                 const DenseVector& v_prev);

// |r|^2 <= tol max(sum |u_i|^2, N |v|^2) and |d|^2 <= tol sum |lambda_i|^2
bool check_stop(const ResidualReport& report, double tol);

// tau_i |dv|^2 + |d lambda_i|^2 / tau_i for one node.
double node_h_progress(double tau, const DenseVector& v, const DenseVector& v_prev, const DenseVector& lambda,
                       const DenseVector& lambda_prev);
double h_norm_progress(std::span<const WorkerState> states, const DenseVector& v, const DenseVector& v_prev,
                       std::span<const DenseVector> lambda_prev);

double assemble_objective(std::span<const double> node_losses, const Regularizer& reg, const DenseVector& v);
TauSummary summarize_taus(std::span<const double> taus);

// Snapshot at k0 = 0: u = 0, lambda = 0 and hat_lambda = grad f_i(0).
AdaptationSnapshot initial_snapshot(const ConsensusProblem& problem, std::size_t node);
AdaptationDeltas make_deltas(const WorkerState& state, const DenseVector& hat, const DenseVector& v,
                             const DenseVector& v_snapshot);

// Serial reference implementation of the adaptive consensus loop.
RunResult run(const ConsensusProblem& problem, const EngineConfig& cfg);

}  // namespace acadmm
