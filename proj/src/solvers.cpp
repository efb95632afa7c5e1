#include "acadmm/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "acadmm/kernels.hpp"
#include "acadmm/lbfgs.hpp"

namespace acadmm {

void InnerSolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw InvalidInput("inner tolerance must be > 0");
  if (max_inner_iters < 1) throw InvalidInput("max_inner_iters must be >= 1");
}

namespace {

void check_inputs(const WorkerShard& shard, const DenseVector& v, const DenseVector& lambda, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidInput("penalty tau must be finite and > 0");
  const auto d = static_cast<Eigen::Index>(shard.dimension());
  if (v.size() != d || lambda.size() != d) throw InvalidInput("subproblem: dimension mismatch");
  if (!all_finite(v) || !all_finite(lambda)) throw InvalidInput("subproblem: non-finite input");
}

// (D^T D + tau I) u
DenseVector apply_normal(const WorkerShard& shard, double tau, const DenseVector& u) {
  DenseVector du, out;
  kernels::serial::csr_matvec(shard.data, u, du);
  kernels::serial::csr_matvec_transpose(shard.data, du, out);
  out += tau * u;
  return out;
}

DenseVector targets_vector(const WorkerShard& shard) {
  return Eigen::Map<const DenseVector>(shard.targets.data(), static_cast<Eigen::Index>(shard.targets.size()));
}

}  // namespace

void FactorizationCache::build(const WorkerShard& shard, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("penalty tau must be > 0");
  if (!built_ && shard.samples() > 0) kernels::serial::csr_matvec_transpose(shard.data, targets_vector(shard), dtc_);
  if (!built_ && shard.samples() == 0) dtc_ = DenseVector::Zero(static_cast<Eigen::Index>(shard.dimension()));
  woodbury_ = shard.dimension() > shard.samples();
  DenseMatrix m;
  if (woodbury_) {
    kernels::serial::csr_outer_gram(shard.data, m);
  } else {
    kernels::serial::csr_gram(shard.data, m);
  }
  m.diagonal().array() += tau;
  llt_.compute(m);
  if (llt_.info() != Eigen::Success) throw InternalError("cholesky factorization failed for tau > 0");
  tau_tag_ = tau;
  built_ = true;
  ++rebuilds_;
}

DenseVector FactorizationCache::solve(const WorkerShard& shard, const DenseVector& rhs) const {
  if (!woodbury_) return llt_.solve(rhs);
  if (shard.samples() == 0) return rhs / tau_tag_;
  // (D^T D + tau I)^{-1} b = (b - D^T (D D^T + tau I)^{-1} D b) / tau
  DenseVector db, t;
  kernels::serial::csr_matvec(shard.data, rhs, db);
  const DenseVector inner = llt_.solve(db);
  kernels::serial::csr_matvec_transpose(shard.data, inner, t);
  return (rhs - t) / tau_tag_;
}

SubproblemResult solve_u_enet(const WorkerShard& shard, const DenseVector& v, const DenseVector& lambda, double tau,
                              FactorizationCache& cache) {
  check_inputs(shard, v, lambda, tau);
  if (!cache.valid_for(tau)) cache.build(shard, tau);
  const DenseVector rhs = cache.dtc() + tau * v + lambda;
  SubproblemResult res;
  res.u = cache.solve(shard, rhs);
  const double target = 1e-10 * (1.0 + rhs.norm());
  DenseVector r = rhs - apply_normal(shard, tau, res.u);
  double rn = r.norm();
  // Iterative refinement for ill-conditioned shards.
  for (int pass = 0; pass < 3 && rn > target; ++pass) {
    res.u += cache.solve(shard, r);
    r = rhs - apply_normal(shard, tau, res.u);
    rn = r.norm();
  }
  res.info.iterations = 1;
  res.info.certificate = rn;
  res.info.warning = rn > target;
  return res;
}

SubproblemResult solve_u_logistic(const WorkerShard& shard, const DenseVector& v, const DenseVector& lambda,
                                  double tau, const InnerSolverConfig& cfg, const DenseVector* warm) {
  check_inputs(shard, v, lambda, tau);
  cfg.validate();
  const DenseVector z = v + lambda / tau;
  SubproblemResult res;
  if (shard.samples() == 0) {
    res.u = z;
    return res;
  }

  const SmoothObjective objective = [&](const DenseVector& u, DenseVector& grad) {
    DenseVector margins;
    kernels::serial::csr_matvec(shard.data, u, margins);
    DenseVector weights(margins.size());
    double value = 0.0;
    for (Eigen::Index j = 0; j < margins.size(); ++j) {
      const double c = shard.targets[static_cast<std::size_t>(j)];
      const double m = c * margins[j];
      if (m > 0) {
        const double e = std::exp(-m);
        value += std::log1p(e);
        weights[j] = -c * e / (1.0 + e);
      } else {
        const double e = std::exp(m);
        value += -m + std::log1p(e);
        weights[j] = -c / (1.0 + e);
      }
    }
    kernels::serial::csr_matvec_transpose(shard.data, weights, grad);
    const DenseVector diff = u - z;
    grad += tau * diff;
    return value + 0.5 * tau * diff.squaredNorm();
  };

  LbfgsOptions opt;
  opt.memory = 10;
  opt.max_iters = cfg.max_inner_iters;
  opt.grad_tol = cfg.tolerance;
  DenseVector x0 = (cfg.warm_start && warm != nullptr && warm->size() == z.size()) ? *warm : z;
  const LbfgsResult lr = minimize_lbfgs(objective, std::move(x0), opt);
  res.u = lr.x;
  res.info.iterations = lr.iterations;
  res.info.certificate = lr.grad_norm;
  res.info.warning = lr.grad_norm > cfg.tolerance * (1.0 + lr.initial_grad_norm);
  return res;
}

SvmGap svm_substep_gap(const WorkerShard& shard, const DenseVector& z, double tau, double c,
                       const SvmDualState& dual) {
  const DenseVector u = z + dual.w / tau;
  SvmGap gap;
  double hinge = 0.0, alpha_sum = 0.0, constant = 0.0;
  for (std::size_t j = 0; j < shard.samples(); ++j) {
    // zero rows: loss c on both sides, alpha_j held at 0
    if (shard.data.row_norm_sq(j) == 0.0) {
      constant += c;
      continue;
    }
    hinge += std::max(1.0 - shard.targets[j] * shard.data.row_dot(j, u), 0.0);
    alpha_sum += dual.alpha[j];
  }
  const double wsq = dual.w.squaredNorm();
  gap.primal = c * hinge + 0.5 * wsq / tau + constant;
  gap.dual = alpha_sum - dual.w.dot(z) - 0.5 * wsq / tau + constant;
  return gap;
}

SubproblemResult solve_u_svm(const WorkerShard& shard, const DenseVector& v, const DenseVector& lambda, double tau,
                             double c, const InnerSolverConfig& cfg, SvmDualState& dual) {
  check_inputs(shard, v, lambda, tau);
  cfg.validate();
  if (!(c >= 0.0)) throw InvalidInput("svm C must be >= 0");
  const std::size_t n = shard.samples();
  const DenseVector z = v + lambda / tau;

  if (dual.alpha.size() != n || dual.w.size() != z.size() || !cfg.warm_start) {
    dual.alpha.assign(n, 0.0);
    dual.w = DenseVector::Zero(z.size());
    dual.order.resize(n);
    std::iota(dual.order.begin(), dual.order.end(), std::size_t{0});
    std::mt19937_64 rng(dual.seed);
    std::shuffle(dual.order.begin(), dual.order.end(), rng);
  }
  // Box may have shrunk if C changed between calls.
  for (std::size_t j = 0; j < n; ++j) {
    if (dual.alpha[j] > c) {
      shard.data.axpy_row(j, (c - dual.alpha[j]) * shard.targets[j], dual.w);
      dual.alpha[j] = c;
    }
  }

  std::vector<double> qnorm(n);
  for (std::size_t j = 0; j < n; ++j) qnorm[j] = shard.data.row_norm_sq(j);

  SubproblemResult res;
  res.u = z + dual.w / tau;
  auto gap_ok = [&](double& gap) {
    const SvmGap g = svm_substep_gap(shard, z, tau, c, dual);
    gap = g.primal - g.dual;
    return gap <= cfg.tolerance * (1.0 + std::abs(g.primal));
  };

  double gap = 0.0;
  bool done = gap_ok(gap);
  int epoch = 0;
  for (; !done && epoch < cfg.max_inner_iters; ++epoch) {
    for (std::size_t j : dual.order) {
      if (qnorm[j] == 0.0) continue;
      const double cj = shard.targets[j];
      const double grad = 1.0 - cj * shard.data.row_dot(j, res.u);
      const double next = std::clamp(dual.alpha[j] + tau * grad / qnorm[j], 0.0, c);
      const double delta = next - dual.alpha[j];
      if (delta == 0.0) continue;
      dual.alpha[j] = next;
      shard.data.axpy_row(j, delta * cj, dual.w);
      shard.data.axpy_row(j, delta * cj / tau, res.u);
    }
    res.u = z + dual.w / tau;
    done = gap_ok(gap);
  }
  res.info.iterations = epoch;
  res.info.certificate = std::max(gap, 0.0);
  res.info.warning = !done;
  return res;
}

DenseVector prox_regularizer(const DenseVector& w, double sigma, const Regularizer& reg) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("prox: sigma must be finite and > 0");
  switch (reg.kind) {
    case RegularizerKind::none: return w;
    case RegularizerKind::ridge: return (sigma / (sigma + 1.0)) * w;
    case RegularizerKind::elastic_net:
    case RegularizerKind::l1: {
      const double rho2 = reg.kind == RegularizerKind::l1 ? 0.0 : reg.rho2;
      DenseVector out(w.size());
      for (Eigen::Index j = 0; j < w.size(); ++j) {
        const double mag = std::max(sigma * std::abs(w[j]) - reg.rho1, 0.0);
        out[j] = mag == 0.0 ? 0.0 : std::copysign(mag, w[j]) / (sigma + rho2);
      }
      return out;
    }
  }
  throw InternalError("unknown regularizer kind");
}

}  // namespace acadmm
