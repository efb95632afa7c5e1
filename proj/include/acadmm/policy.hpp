#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "acadmm/types.hpp"

namespace acadmm {

enum class PolicyKind { fixed, rb, crb, aadmm, acadmm };

std::string_view to_string(PolicyKind k);
PolicyKind parse_policy_kind(std::string_view s);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::acadmm;
  int t_f = 2;            // adaptation period
  double eps_cor = 0.2;   // correlation threshold
  double c_cg = 1e10;     // convergence constant of the change band
  double rb_mu = 10.0;    // residual ratio that triggers RB/CRB
  double rb_factor = 2.0; // RB/CRB multiplicative step

  void validate() const;
  bool adapts_at(long k) const noexcept;
  bool is_global() const noexcept { return kind == PolicyKind::rb || kind == PolicyKind::aadmm; }
};

// Deltas against the k0 snapshot. dv uses the sign -v^k + v^{k0}.
struct AdaptationDeltas {
  DenseVector du;   // u^k - u^{k0}
  DenseVector dhl;  // hat_lambda^k - hat_lambda^{k0}
  DenseVector dv;   // -v^k + v^{k0}
  DenseVector dl;   // lambda^k - lambda^{k0}
};

struct CurvatureEstimate {
  std::optional<double> value;  // empty when unreliable
  double correlation = 0.0;
  bool reliable() const noexcept { return value.has_value(); }
};

// Per-node diagnostics of one adaptation step.
struct AdaptationOutcome {
  CurvatureEstimate alpha;
  CurvatureEstimate beta;
  double candidate = 0.0;  // tau-hat before clipping
  double tau = 0.0;        // clipped new penalty
  // A correlation gate passed but the inner product was not positive
  // (only reachable with eps_cor <= 0); the outcome fell back to tau_cur.
  bool fallback = false;
};

// Hybrid steepest-descent / minimum-gradient secant estimate of dy ~ c dx.
// Empty when <dx, dy> <= 0 or a norm is zero.
std::optional<double> spectral_estimate(const DenseVector& dx, const DenseVector& dy);
// Same, from precomputed inner products <dx,dx>, <dx,dy>, <dy,dy>.
std::optional<double> spectral_estimate(double xx, double xy, double yy);

// <dx, dy> / (|dx| |dy|), 0 when either norm vanishes.
double correlation(const DenseVector& dx, const DenseVector& dy);
double correlation(double xx, double xy, double yy);

// Four-branch candidate rule: sqrt(alpha beta), alpha, beta or tau_cur.
double acadmm_candidate(double alpha_hat, double alpha_cor, double beta_hat, double beta_cor, double tau_cur,
                        double eps_cor);

// Clips tau_hat to [tau_cur / (1 + c_cg/k^2), (1 + c_cg/k^2) tau_cur]. The
// result always satisfies within_change_band(tau_cur, result, k, c_cg).
double safeguard_clip(double tau_hat, double tau_cur, long k, double c_cg);

// max(new/old, old/new) - 1 <= c_cg / k^2, evaluated exactly this way.
bool within_change_band(double tau_old, double tau_new, long k, double c_cg);

AdaptationOutcome acadmm_update(const AdaptationDeltas& deltas, double tau_cur, long k, const PolicyConfig& cfg);

// Residual balancing on norms |r|, |d| (not squared).
double rb_update(double r_norm, double d_norm, double tau_cur, long k, const PolicyConfig& cfg);
// Per-node residual balancing on |r_i|, |d_i|.
double crb_update(double r_norm, double d_norm, double tau_cur, long k, const PolicyConfig& cfg);

// Global spectral estimate from the deltas of all nodes stacked (Nd-dim).
// The stacked B*dv block repeats dv once per node.
AdaptationOutcome aadmm_update(std::span<const AdaptationDeltas> deltas, double tau_cur, long k,
                               const PolicyConfig& cfg);

}  // namespace acadmm
