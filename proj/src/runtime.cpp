#include "acadmm/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace acadmm {

Worker::Worker(const ConsensusProblem& problem, std::size_t node, const EngineConfig& cfg)
    : problem_(&problem), cfg_(&cfg), node_(node) {
  const auto d = static_cast<Eigen::Index>(problem.dimension);
  spectral_ = cfg.policy.kind == PolicyKind::acadmm || cfg.policy.kind == PolicyKind::aadmm;
  state_.u = DenseVector::Zero(d);
  state_.lambda = DenseVector::Zero(d);
  state_.tau = cfg.tau0;
  if (spectral_) state_.snapshot = initial_snapshot(problem, node);
  cache_.svm.seed = cfg.seed + node;
  v_snapshot_ = DenseVector::Zero(d);
}

std::optional<WorkerReportMsg> worker_round(Worker& w, const BroadcastMsg& msg) {
  if (msg.stop) w.stopped_ = true;
  if (w.stopped_) return std::nullopt;

  WorkerReportMsg rep;
  rep.node = w.node_;
  rep.k = msg.k;
  if (msg.k != w.k_ + 1) {
    rep.error = "broadcast for round " + std::to_string(msg.k) + " while at round " + std::to_string(w.k_);
    return rep;
  }
  w.k_ = msg.k;
  if (w.pending_snapshot_) {
    w.state_.snapshot = std::move(w.pending_snapshot_);
    w.pending_snapshot_.reset();
    w.v_snapshot_ = w.pending_v_snapshot_;
  }
  if (msg.tau) {
    w.state_.tau = *msg.tau;
  } else if (w.pending_tau_) {
    w.state_.tau = *w.pending_tau_;
  }
  w.pending_tau_.reset();

  try {
    SubproblemResult sr = u_step(*w.problem_, w.node_, w.state_, msg.v, w.cache_, w.cfg_->inner);
    rep.inner_warning = sr.info.warning;
    w.u_pending_ = std::move(sr.u);
  } catch (const std::exception& e) {
    rep.error = e.what();
    return rep;
  }
  rep.tau = w.state_.tau;
  rep.weighted = weighted_contribution(w.u_pending_, w.state_.lambda, w.state_.tau);
  return rep;
}

WorkerStatusMsg worker_complete(Worker& w, const BroadcastMsg& msg) {
  if (msg.k != w.k_) throw ProtocolError("dual-phase broadcast for a different round");
  const long k = msg.k;
  const PolicyConfig& pol = w.cfg_->policy;
  auto& s = w.state_;

  const DenseVector lambda_prev = s.lambda;
  s.u = w.u_pending_;
  const bool adapt = pol.adapts_at(k);
  DenseVector hat;
  if (adapt && w.spectral_) hat = hat_lambda(lambda_prev, s.tau, msg.v_prev, s.u);
  s.lambda = dual_step(s, msg.v);

  WorkerStatusMsg st;
  st.node = w.node_;
  st.k = k;
  st.norms = local_residual_norms(s, msg.v, msg.v_prev);
  st.h_progress = node_h_progress(s.tau, msg.v, msg.v_prev, s.lambda, lambda_prev);
  st.loss = loss_value(*w.problem_, w.node_, msg.v);
  st.next_tau = s.tau;

  if (adapt) {
    if (w.spectral_) {
      AdaptationDeltas deltas = make_deltas(s, hat, msg.v, w.v_snapshot_);
      w.pending_snapshot_ = AdaptationSnapshot{s.u, s.lambda, hat, k};
      w.pending_v_snapshot_ = msg.v;
      if (pol.kind == PolicyKind::acadmm) {
        st.adaptation = acadmm_update(deltas, s.tau, k, pol);
        w.pending_tau_ = st.adaptation->tau;
        st.next_tau = st.adaptation->tau;
      } else {
        st.deltas = std::move(deltas);
      }
    } else if (pol.kind == PolicyKind::crb) {
      w.pending_tau_ = crb_update(std::sqrt(st.norms.r_sq), std::sqrt(st.norms.d_sq), s.tau, k, pol);
      st.next_tau = *w.pending_tau_;
    }
  }
  return st;
}

namespace {

template <typename T>
void check_keys(std::span<const std::pair<std::size_t, T>> values) {
  std::vector<bool> seen(values.size(), false);
  for (const auto& [id, _] : values) {
    if (id >= values.size() || seen[id]) throw ProtocolError("reduction keys must be exactly 0..N-1");
    seen[id] = true;
  }
}

// Messages ordered by node id after checking one-per-node for round k.
template <typename Msg>
std::vector<const Msg*> order_messages(std::span<const Msg> msgs, std::size_t nodes, long k, bool deterministic) {
  if (msgs.size() != nodes)
    throw ProtocolError("round " + std::to_string(k) + ": expected " + std::to_string(nodes) + " messages, got " +
                        std::to_string(msgs.size()));
  std::vector<const Msg*> slot(nodes, nullptr);
  std::vector<const Msg*> arrival;
  arrival.reserve(nodes);
  for (const auto& m : msgs) {
    if (m.node >= nodes) throw ProtocolError("message from unknown node " + std::to_string(m.node));
    if (slot[m.node] != nullptr) throw ProtocolError("duplicate message from node " + std::to_string(m.node));
    if (m.k != k) throw ProtocolError("stale message from node " + std::to_string(m.node));
    slot[m.node] = &m;
    arrival.push_back(&m);
  }
  return deterministic ? slot : arrival;
}

DenseVector tree_sum(std::vector<DenseVector> xs) {
  while (xs.size() > 1) {
    std::vector<DenseVector> next;
    next.reserve((xs.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) next.push_back(xs[i] + xs[i + 1]);
    if (xs.size() % 2 == 1) next.push_back(std::move(xs.back()));
    xs = std::move(next);
  }
  return std::move(xs.front());
}

}  // namespace

double deterministic_reduce(std::span<const std::pair<std::size_t, double>> values) {
  if (values.empty()) throw ProtocolError("empty reduction");
  check_keys(values);
  std::vector<double> sorted(values.size());
  for (const auto& [id, x] : values) sorted[id] = x;
  double s = sorted.front();
  for (std::size_t i = 1; i < sorted.size(); ++i) s += sorted[i];
  return s;
}

DenseVector deterministic_reduce(std::span<const std::pair<std::size_t, DenseVector>> values) {
  if (values.empty()) throw ProtocolError("empty reduction");
  check_keys(values);
  std::vector<const DenseVector*> sorted(values.size());
  for (const auto& [id, x] : values) sorted[id] = &x;
  DenseVector s = *sorted.front();
  for (std::size_t i = 1; i < sorted.size(); ++i) s += *sorted[i];
  return s;
}

BroadcastMsg coordinator_round(std::span<const WorkerReportMsg> reports, std::size_t nodes, long k,
                               const DenseVector& v_current, const Regularizer& reg, bool deterministic) {
  for (const auto& r : reports)
    if (r.error) throw SubproblemError(r.node, r.k, *r.error);
  const auto ordered = order_messages(reports, nodes, k, deterministic);

  BroadcastMsg out;
  out.k = k;
  out.v_prev = v_current;
  if (deterministic) {
    std::vector<DenseVector> weighted;
    std::vector<double> taus;
    weighted.reserve(nodes);
    taus.reserve(nodes);
    for (const auto* r : ordered) {
      weighted.push_back(r->weighted);
      taus.push_back(r->tau);
    }
    out.v = v_step_from_weighted(weighted, taus, reg);
  } else {
    std::vector<DenseVector> weighted;
    double sigma = 0.0;
    for (const auto* r : ordered) {
      if (!(r->tau > 0.0)) throw InvalidInput("v_step: tau must be > 0");
      weighted.push_back(r->weighted);
      sigma += r->tau;
    }
    out.v = prox_regularizer(tree_sum(std::move(weighted)) / sigma, sigma, reg);
  }
  return out;
}

RoundClose coordinator_finish(std::span<const WorkerStatusMsg> statuses, std::size_t nodes, long k,
                              const DenseVector& v, const Regularizer& reg, double tol,
                              std::span<const double> taus, const PolicyConfig& policy, bool deterministic) {
  const auto ordered = order_messages(statuses, nodes, k, deterministic);
  if (taus.size() != nodes) throw ProtocolError("coordinator_finish: need one tau per node");

  std::vector<LocalNorms> norms;
  std::vector<double> losses;
  norms.reserve(nodes);
  losses.reserve(nodes);
  double h = 0.0;
  for (const auto* s : ordered) {
    norms.push_back(s->norms);
    losses.push_back(s->loss);
    h += s->h_progress;
  }

  RoundClose out;
  auto& rec = out.record;
  rec.k = k;
  rec.residuals = assemble_residuals(norms, v);
  rec.objective = assemble_objective(losses, reg, v);
  rec.h_progress = h;
  rec.taus.assign(taus.begin(), taus.end());
  rec.tau = summarize_taus(taus);
  out.stop = check_stop(rec.residuals, tol);
  rec.next_taus = rec.taus;
  if (out.stop || !policy.adapts_at(k)) return out;

  // Per-node fields are read by node id, independent of arrival order.
  std::vector<const WorkerStatusMsg*> by_node(nodes);
  for (const auto* s : ordered) by_node[s->node] = s;

  switch (policy.kind) {
    case PolicyKind::fixed: break;
    case PolicyKind::acadmm:
      for (std::size_t i = 0; i < nodes; ++i) {
        if (!by_node[i]->adaptation) throw ProtocolError("acadmm status without adaptation outcome");
        rec.adaptation.push_back(*by_node[i]->adaptation);
        rec.next_taus[i] = by_node[i]->next_tau;
      }
      break;
    case PolicyKind::crb:
      for (std::size_t i = 0; i < nodes; ++i) rec.next_taus[i] = by_node[i]->next_tau;
      break;
    case PolicyKind::rb: {
      const double t =
          rb_update(std::sqrt(rec.residuals.primal_sq), std::sqrt(rec.residuals.dual_sq), taus.front(), k, policy);
      rec.next_taus.assign(nodes, t);
      out.global_tau = t;
      break;
    }
    case PolicyKind::aadmm: {
      std::vector<AdaptationDeltas> deltas;
      deltas.reserve(nodes);
      for (std::size_t i = 0; i < nodes; ++i) {
        if (!by_node[i]->deltas) throw ProtocolError("aadmm status without deltas");
        deltas.push_back(*by_node[i]->deltas);
      }
      const AdaptationOutcome o = aadmm_update(deltas, taus.front(), k, policy);
      rec.adaptation.assign(nodes, o);
      rec.next_taus.assign(nodes, o.tau);
      out.global_tau = o.tau;
      break;
    }
  }
  return out;
}

namespace {

// Runs body(i) for every worker, in parallel when requested. Exceptions are
// captured per worker and the first one (lowest id) is rethrown.
template <typename Body>
void for_each_worker(std::size_t n, const RunTopology& topo, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
  if (topo.mode == ExecutionMode::sequential) {
    for (long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    const int threads = topo.threads > 0 ? topo.threads : static_cast<int>(n);
    (void)threads;
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

RunResult run_distributed(const ConsensusProblem& problem, const EngineConfig& cfg, const RunTopology& topo) {
  problem.validate();
  cfg.validate();
  const std::size_t n = problem.nodes();
  if (topo.workers != n) throw InvalidInput("topology worker count differs from the number of shards");
  const auto d = static_cast<Eigen::Index>(problem.dimension);

  std::vector<Worker> workers;
  workers.reserve(n);
  for (std::size_t i = 0; i < n; ++i) workers.emplace_back(problem, i, cfg);

  Mailbox<WorkerReportMsg> reports_box;
  Mailbox<WorkerStatusMsg> status_box;

  RunResult result;
  DenseVector v = DenseVector::Zero(d);
  BroadcastMsg down;
  down.k = 1;
  down.v = v;
  down.v_prev = v;

  for (long k = 1; k <= cfg.maxiter; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    down.k = k;
    for_each_worker(n, topo, [&](std::size_t i) {
      if (auto rep = worker_round(workers[i], down)) reports_box.post(std::move(*rep));
    });
    const std::vector<WorkerReportMsg> reports = reports_box.drain();
    const BroadcastMsg dual = coordinator_round(reports, n, k, v, problem.regularizer, topo.deterministic_reduction);

    std::vector<double> taus(n);
    for (const auto& r : reports) taus[r.node] = r.tau;
    int warnings = 0;
    for (const auto& r : reports) warnings += r.inner_warning ? 1 : 0;

    for_each_worker(n, topo, [&](std::size_t i) { status_box.post(worker_complete(workers[i], dual)); });
    const std::vector<WorkerStatusMsg> statuses = status_box.drain();
    RoundClose close = coordinator_finish(statuses, n, k, dual.v, problem.regularizer, cfg.tol, taus, cfg.policy,
                                          topo.deterministic_reduction);
    close.record.inner_warnings = warnings;
    if (cfg.record_wall_clock)
      close.record.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.records.push_back(std::move(close.record));

    v = dual.v;
    if (close.stop) {
      result.reason = StopReason::converged;
      BroadcastMsg halt;
      halt.k = k + 1;
      halt.stop = true;
      for (auto& w : workers) (void)worker_round(w, halt);
      break;
    }
    down = BroadcastMsg{};
    down.v = v;
    down.v_prev = dual.v_prev;
    down.tau = close.global_tau;
  }
  result.v = v;
  result.workers.reserve(n);
  for (const auto& w : workers) result.workers.push_back(w.state());
  return result;
}

}  // namespace acadmm
