#include "acadmm/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace acadmm {

std::string_view to_string(StopReason r) {
  return r == StopReason::converged ? "converged" : "max_iterations";
}

void EngineConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidInput("tol must be > 0");
  if (maxiter < 1) throw InvalidInput("maxiter must be >= 1");
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) throw InvalidInput("tau0 must be finite and > 0");
  policy.validate();
  inner.validate();
}

SubproblemResult u_step(const ConsensusProblem& problem, std::size_t node, const WorkerState& worker,
                        const DenseVector& v, SubproblemCache& cache, const InnerSolverConfig& inner) {
  if (!(worker.tau > 0.0)) throw InvalidInput("u_step: tau must be > 0");
  const auto& shard = problem.shards.at(node);
  SubproblemResult r;
  switch (problem.loss) {
    case LossKind::squared: r = solve_u_enet(shard, v, worker.lambda, worker.tau, cache.factor); break;
    case LossKind::logistic: r = solve_u_logistic(shard, v, worker.lambda, worker.tau, inner, &worker.u); break;
    case LossKind::hinge: r = solve_u_svm(shard, v, worker.lambda, worker.tau, problem.svm_c, inner, cache.svm); break;
  }
  if (!all_finite(r.u)) throw InternalError("subproblem produced a non-finite iterate");
  return r;
}

DenseVector weighted_contribution(const DenseVector& u, const DenseVector& lambda, double tau) {
  return tau * u - lambda;
}

DenseVector v_step_from_weighted(std::span<const DenseVector> weighted, std::span<const double> tau,
                                 const Regularizer& reg) {
  if (weighted.empty() || weighted.size() != tau.size()) throw InvalidInput("v_step: need one tau per node");
  const Eigen::Index d = weighted.front().size();
  DenseVector acc = DenseVector::Zero(d);
  double sigma = 0.0;
  for (std::size_t i = 0; i < weighted.size(); ++i) {
    if (weighted[i].size() != d) throw InvalidInput("v_step: dimension mismatch");
    if (!(tau[i] > 0.0)) throw InvalidInput("v_step: tau must be > 0");
    acc += weighted[i];
    sigma += tau[i];
  }
  return prox_regularizer(acc / sigma, sigma, reg);
}

DenseVector v_step(std::span<const DenseVector> u, std::span<const DenseVector> lambda, std::span<const double> tau,
                   const Regularizer& reg) {
  if (u.size() != lambda.size() || u.size() != tau.size()) throw InvalidInput("v_step: list lengths differ");
  std::vector<DenseVector> weighted;
  weighted.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].size() != lambda[i].size()) throw InvalidInput("v_step: dimension mismatch");
    weighted.push_back(weighted_contribution(u[i], lambda[i], tau[i]));
  }
  return v_step_from_weighted(weighted, tau, reg);
}

DenseVector dual_step(const WorkerState& worker, const DenseVector& v_new) {
  return worker.lambda + worker.tau * (v_new - worker.u);
}

DenseVector hat_lambda(const DenseVector& lambda_prev, double tau, const DenseVector& v_prev, const DenseVector& u) {
  return lambda_prev + tau * (v_prev - u);
}

LocalNorms local_residual_norms(const WorkerState& state, const DenseVector& v, const DenseVector& v_prev) {
  LocalNorms n;
  n.u_sq = state.u.squaredNorm();
  n.lambda_sq = state.lambda.squaredNorm();
  n.r_sq = (v - state.u).squaredNorm();
  n.d_sq = (state.tau * (v_prev - v)).squaredNorm();
  return n;
}

ResidualReport assemble_residuals(std::span<const LocalNorms> nodes, const DenseVector& v) {
  ResidualReport rep;
  rep.per_node.reserve(nodes.size());
  for (const auto& n : nodes) {
    rep.primal_sq += n.r_sq;
    rep.dual_sq += n.d_sq;
    rep.sum_u_sq += n.u_sq;
    rep.sum_lambda_sq += n.lambda_sq;
    rep.per_node.push_back({n.r_sq, n.d_sq});
  }
  rep.n_v_sq = static_cast<double>(nodes.size()) * v.squaredNorm();
  return rep;
}

ResidualReport compute_residuals(std::span<const WorkerState> states, const DenseVector& v,
                                 const DenseVector& v_prev) {
  if (v.size() != v_prev.size()) throw InvalidInput("compute_residuals: dimension mismatch");
  std::vector<LocalNorms> nodes;
  nodes.reserve(states.size());
  for (const auto& s : states) {
    if (s.u.size() != v.size()) throw InvalidInput("compute_residuals: dimension mismatch");
    nodes.push_back(local_residual_norms(s, v, v_prev));
  }
  return assemble_residuals(nodes, v);
}

bool check_stop(const ResidualReport& report, double tol) {
  return report.primal_sq <= tol * report.primal_scale() && report.dual_sq <= tol * report.sum_lambda_sq;
}

double node_h_progress(double tau, const DenseVector& v, const DenseVector& v_prev, const DenseVector& lambda,
                       const DenseVector& lambda_prev) {
  if (!(tau > 0.0)) throw InvalidInput("h_norm_progress: tau must be > 0");
  return tau * (v - v_prev).squaredNorm() + (lambda - lambda_prev).squaredNorm() / tau;
}

double h_norm_progress(std::span<const WorkerState> states, const DenseVector& v, const DenseVector& v_prev,
                       std::span<const DenseVector> lambda_prev) {
  if (states.size() != lambda_prev.size()) throw InvalidInput("h_norm_progress: list lengths differ");
  double h = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    h += node_h_progress(states[i].tau, v, v_prev, states[i].lambda, lambda_prev[i]);
  return h;
}

double assemble_objective(std::span<const double> node_losses, const Regularizer& reg, const DenseVector& v) {
  double s = 0.0;
  for (double f : node_losses) s += f;
  return s + reg.value(v);
}

TauSummary summarize_taus(std::span<const double> taus) {
  TauSummary t;
  if (taus.empty()) return t;
  t.min = taus.front();
  t.max = taus.front();
  double sum = 0.0;
  for (double x : taus) {
    t.min = std::min(t.min, x);
    t.max = std::max(t.max, x);
    sum += x;
  }
  t.mean = sum / static_cast<double>(taus.size());
  return t;
}

AdaptationSnapshot initial_snapshot(const ConsensusProblem& problem, std::size_t node) {
  const auto d = static_cast<Eigen::Index>(problem.dimension);
  AdaptationSnapshot s;
  s.u = DenseVector::Zero(d);
  s.lambda = DenseVector::Zero(d);
  s.hat_lambda = loss_gradient(problem, node, s.u);
  s.k0 = 0;
  return s;
}

AdaptationDeltas make_deltas(const WorkerState& state, const DenseVector& hat, const DenseVector& v,
                             const DenseVector& v_snapshot) {
  if (!state.snapshot) throw InternalError("adaptation without a k0 snapshot");
  const auto& s = *state.snapshot;
  return {state.u - s.u, hat - s.hat_lambda, v_snapshot - v, state.lambda - s.lambda};
}

RunResult run(const ConsensusProblem& problem, const EngineConfig& cfg) {
  problem.validate();
  cfg.validate();
  const std::size_t n = problem.nodes();
  const auto d = static_cast<Eigen::Index>(problem.dimension);
  const PolicyConfig& pol = cfg.policy;
  const bool spectral = pol.kind == PolicyKind::acadmm || pol.kind == PolicyKind::aadmm;

  std::vector<WorkerState> workers(n);
  std::vector<SubproblemCache> caches(n);
  for (std::size_t i = 0; i < n; ++i) {
    workers[i].u = DenseVector::Zero(d);
    workers[i].lambda = DenseVector::Zero(d);
    workers[i].tau = cfg.tau0;
    if (spectral) workers[i].snapshot = initial_snapshot(problem, i);
    caches[i].svm.seed = cfg.seed + i;
  }
  GlobalState global;
  global.v = DenseVector::Zero(d);
  global.v_prev = DenseVector::Zero(d);
  global.v_snapshot = DenseVector::Zero(d);

  RunResult result;
  result.records.reserve(static_cast<std::size_t>(std::min<long>(cfg.maxiter, 4096)));

  std::vector<DenseVector> u_new(n), weighted(n), lambda_prev(n), hats(n);
  std::vector<double> taus(n), losses(n);
  std::vector<LocalNorms> norms(n);

  for (long k = 1; k <= cfg.maxiter; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.k = k;
    for (std::size_t i = 0; i < n; ++i) taus[i] = workers[i].tau;

    // u-step (local)
    for (std::size_t i = 0; i < n; ++i) {
      SubproblemResult sr;
      try {
        sr = u_step(problem, i, workers[i], global.v, caches[i], cfg.inner);
      } catch (const std::exception& e) {
        throw SubproblemError(i, k, e.what());
      }
      if (sr.info.warning) ++rec.inner_warnings;
      u_new[i] = std::move(sr.u);
      weighted[i] = weighted_contribution(u_new[i], workers[i].lambda, taus[i]);
    }

    // v-step (central)
    DenseVector v_new = v_step_from_weighted(weighted, taus, problem.regularizer);

    // dual step (local) plus local norms
    const bool adapt = pol.adapts_at(k);
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto& w = workers[i];
      lambda_prev[i] = w.lambda;
      w.u = u_new[i];
      if (adapt && spectral) hats[i] = hat_lambda(lambda_prev[i], taus[i], global.v, w.u);
      w.lambda = dual_step(w, v_new);
      norms[i] = local_residual_norms(w, v_new, global.v);
      h += node_h_progress(taus[i], v_new, global.v, w.lambda, lambda_prev[i]);
      losses[i] = loss_value(problem, i, v_new);
    }
    rec.residuals = assemble_residuals(norms, v_new);
    rec.objective = assemble_objective(losses, problem.regularizer, v_new);
    rec.h_progress = h;
    rec.taus = taus;
    rec.tau = summarize_taus(taus);

    global.v_prev = std::move(global.v);
    global.v = std::move(v_new);
    global.iter = k;

    const bool stop = check_stop(rec.residuals, cfg.tol);
    if (!stop && adapt) {
      std::vector<AdaptationDeltas> deltas;
      if (spectral) {
        deltas.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
          deltas.push_back(make_deltas(workers[i], hats[i], global.v, global.v_snapshot));
          if (cfg.on_adaptation) cfg.on_adaptation({k, i, workers[i], hats[i], deltas.back()});
        }
      }
      switch (pol.kind) {
        case PolicyKind::fixed: break;
        case PolicyKind::acadmm:
          for (std::size_t i = 0; i < n; ++i) {
            rec.adaptation.push_back(acadmm_update(deltas[i], taus[i], k, pol));
            workers[i].tau = rec.adaptation.back().tau;
          }
          break;
        case PolicyKind::aadmm: {
          const AdaptationOutcome out = aadmm_update(deltas, taus.front(), k, pol);
          rec.adaptation.assign(n, out);
          for (auto& w : workers) w.tau = out.tau;
          break;
        }
        case PolicyKind::crb:
          for (std::size_t i = 0; i < n; ++i)
            workers[i].tau = crb_update(std::sqrt(norms[i].r_sq), std::sqrt(norms[i].d_sq), taus[i], k, pol);
          break;
        case PolicyKind::rb: {
          const double t = rb_update(std::sqrt(rec.residuals.primal_sq), std::sqrt(rec.residuals.dual_sq),
                                     taus.front(), k, pol);
          for (auto& w : workers) w.tau = t;
          break;
        }
      }
      if (spectral) {
        for (std::size_t i = 0; i < n; ++i)
          workers[i].snapshot = AdaptationSnapshot{workers[i].u, workers[i].lambda, hats[i], k};
        global.v_snapshot = global.v;
      }
    }
    rec.next_taus.resize(n);
    for (std::size_t i = 0; i < n; ++i) rec.next_taus[i] = workers[i].tau;
    if (cfg.record_wall_clock)
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.records.push_back(std::move(rec));
    if (stop) {
      result.reason = StopReason::converged;
      break;
    }
  }
  result.v = global.v;
  result.workers = std::move(workers);
  return result;
}

}  // namespace acadmm
