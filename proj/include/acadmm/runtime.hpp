#pragma once

// Coordinator/worker execution of the consensus loop.
//
// Each iteration k is a synchronous two-phase round:
//
//   coordinator --BroadcastMsg{k, v^{k-1}, [tau]}--> workers    u-step
//   workers --WorkerReportMsg{tau u - lambda, tau}--> coordinator  v-step
//   coordinator --BroadcastMsg{k, v^k, v^{k-1}}--> workers     dual step,
//   workers --WorkerStatusMsg{norms, loss, [deltas]}--> coordinator   local adaptation
//
// The coordinator then evaluates the stopping rule and, for the global
// policies (rb, aadmm), the shared penalty carried by the next broadcast.
// Messages are plain values; a worker never sees another worker's state.

#include <cstddef>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "acadmm/engine.hpp"

namespace acadmm {

enum class ExecutionMode { sequential, parallel_threads };

struct RunTopology {
  std::size_t workers = 1;
  ExecutionMode mode = ExecutionMode::parallel_threads;
  int threads = 0;  // 0: one per worker
  // Sum contributions in ascending node id. Off: pairwise tree in arrival
  // order, faster for many nodes but not bit-reproducible.
  bool deterministic_reduction = true;
};

struct BroadcastMsg {
  long k = 0;
  DenseVector v;       // v^{k-1} in the u-phase, v^k in the dual phase
  DenseVector v_prev;  // v^{k-1} in the dual phase
  bool stop = false;
  std::optional<double> tau;  // shared penalty for rb / aadmm
};

struct WorkerReportMsg {
  std::size_t node = 0;
  long k = 0;
  DenseVector weighted;  // tau_i u_i^k - lambda_i^{k-1}
  double tau = 0.0;
  bool inner_warning = false;
  std::optional<std::string> error;
};

struct WorkerStatusMsg {
  std::size_t node = 0;
  long k = 0;
  LocalNorms norms;
  double h_progress = 0.0;
  double loss = 0.0;  // f_i(v^k)
  double next_tau = 0.0;
  std::optional<AdaptationOutcome> adaptation;
  std::optional<AdaptationDeltas> deltas;  // aadmm only
};

// Worker-confined state: iterates, solver caches and the k0 snapshot.
class Worker {
 public:
  Worker(const ConsensusProblem& problem, std::size_t node, const EngineConfig& cfg);

  std::size_t node() const noexcept { return node_; }
  const WorkerState& state() const noexcept { return state_; }
  bool stopped() const noexcept { return stopped_; }

 private:
  friend std::optional<WorkerReportMsg> worker_round(Worker& w, const BroadcastMsg& msg);
  friend WorkerStatusMsg worker_complete(Worker& w, const BroadcastMsg& msg);

  const ConsensusProblem* problem_;
  const EngineConfig* cfg_;
  std::size_t node_;
  long k_ = 0;
  bool stopped_ = false;
  bool spectral_ = false;
  WorkerState state_;
  SubproblemCache cache_;
  DenseVector u_pending_;
  DenseVector v_snapshot_;
  std::optional<double> pending_tau_;
  std::optional<AdaptationSnapshot> pending_snapshot_;
  DenseVector pending_v_snapshot_;
};

// u-phase. Returns nothing once a stop broadcast has been seen.
std::optional<WorkerReportMsg> worker_round(Worker& w, const BroadcastMsg& msg);
// Dual phase: lambda update, local norms and local penalty adaptation.
WorkerStatusMsg worker_complete(Worker& w, const BroadcastMsg& msg);

// Sum in ascending node id. Requires the key set to be exactly 0..N-1.
double deterministic_reduce(std::span<const std::pair<std::size_t, double>> values);
DenseVector deterministic_reduce(std::span<const std::pair<std::size_t, DenseVector>> values);

// v-step from one report per node. Throws ProtocolError on a missing,
// duplicate or stale report and SubproblemError if a worker failed.
BroadcastMsg coordinator_round(std::span<const WorkerReportMsg> reports, std::size_t nodes, long k,
                               const DenseVector& v_current, const Regularizer& reg,
                               bool deterministic = true);

struct RoundClose {
  IterationRecord record;
  bool stop = false;
  std::optional<double> global_tau;
};

// Residual assembly, stop test and (rb / aadmm) the shared penalty update.
RoundClose coordinator_finish(std::span<const WorkerStatusMsg> statuses, std::size_t nodes, long k,
                              const DenseVector& v, const Regularizer& reg, double tol,
                              std::span<const double> taus, const PolicyConfig& policy,
                              bool deterministic = true);

// In-process channel: many producers, one consumer draining per round.
template <typename T>
class Mailbox {
 public:
  void post(T msg) {
    std::lock_guard lock(mu_);
    items_.push_back(std::move(msg));
  }
  std::vector<T> drain() {
    std::lock_guard lock(mu_);
    std::vector<T> out;
    out.swap(items_);
    return out;
  }

 private:
  std::mutex mu_;
  std::vector<T> items_;
};

RunResult run_distributed(const ConsensusProblem& problem, const EngineConfig& cfg, const RunTopology& topo);

}  // namespace acadmm
