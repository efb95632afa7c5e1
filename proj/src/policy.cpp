#include "acadmm/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace acadmm {

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::fixed: return "fixed";
    case PolicyKind::rb: return "rb";
    case PolicyKind::crb: return "crb";
    case PolicyKind::aadmm: return "aadmm";
    case PolicyKind::acadmm: return "acadmm";
  }
  return "?";
}

PolicyKind parse_policy_kind(std::string_view s) {
  if (s == "fixed" || s == "cadmm") return PolicyKind::fixed;
  if (s == "rb") return PolicyKind::rb;
  if (s == "crb") return PolicyKind::crb;
  if (s == "aadmm") return PolicyKind::aadmm;
  if (s == "acadmm") return PolicyKind::acadmm;
  throw InvalidInput("unknown policy '" + std::string(s) + "'");
}

void PolicyConfig::validate() const {
  if (t_f < 1) throw InvalidInput("T_f must be >= 1");
  if (!(eps_cor < 1.0)) throw InvalidInput("eps_cor must be < 1");
  if (!(c_cg > 0.0)) throw InvalidInput("C_cg must be > 0");
  if (!(rb_mu > 1.0)) throw InvalidInput("rb_mu must be > 1");
  if (!(rb_factor > 1.0)) throw InvalidInput("rb_factor must be > 1");
}

bool PolicyConfig::adapts_at(long k) const noexcept {
  if (kind == PolicyKind::fixed || k < 1) return false;
  return t_f == 1 || k % t_f == 1;
}

std::optional<double> spectral_estimate(double xx, double xy, double yy) {
  if (!(xx > 0.0) || !(yy > 0.0) || !(xy > 0.0)) return std::nullopt;
  const double sd = yy / xy;
  const double mg = xy / xx;
  const double est = (2.0 * mg > sd) ? mg : sd - 0.5 * mg;
  if (!(est > 0.0) || !std::isfinite(est)) return std::nullopt;
  return est;
}

std::optional<double> spectral_estimate(const DenseVector& dx, const DenseVector& dy) {
  return spectral_estimate(dx.squaredNorm(), dx.dot(dy), dy.squaredNorm());
}

double correlation(double xx, double xy, double yy) {
  if (!(xx > 0.0) || !(yy > 0.0)) return 0.0;
  const double c = xy / (std::sqrt(xx) * std::sqrt(yy));
  return std::clamp(c, -1.0, 1.0);
}

double correlation(const DenseVector& dx, const DenseVector& dy) {
  return correlation(dx.squaredNorm(), dx.dot(dy), dy.squaredNorm());
}

double acadmm_candidate(double alpha_hat, double alpha_cor, double beta_hat, double beta_cor, double tau_cur,
                        double eps_cor) {
  const bool a = alpha_cor > eps_cor;
  const bool b = beta_cor > eps_cor;
  if (a && b) return std::sqrt(alpha_hat * beta_hat);
  if (a) return alpha_hat;
  if (b) return beta_hat;
  return tau_cur;
}

bool within_change_band(double tau_old, double tau_new, long k, double c_cg) {
  const double kk = static_cast<double>(k);
  return std::max(tau_new / tau_old, tau_old / tau_new) - 1.0 <= c_cg / (kk * kk);
}

double safeguard_clip(double tau_hat, double tau_cur, long k, double c_cg) {
  if (k < 1) throw InvalidInput("safeguard_clip: k must be >= 1");
  if (!(tau_cur > 0.0) || !std::isfinite(tau_cur)) throw InvalidInput("safeguard_clip: tau must be finite and > 0");
  if (!(tau_hat > 0.0) || !std::isfinite(tau_hat)) tau_hat = tau_cur;
  const double kk = static_cast<double>(k);
  const double band = 1.0 + c_cg / (kk * kk);
  double t = std::max(std::min(tau_hat, band * tau_cur), tau_cur / band);
  // Rounding in band*tau can leave the ratio one ulp outside; pull it in.
  while (!within_change_band(tau_cur, t, k, c_cg)) {
    t = t > tau_cur ? std::nextafter(t, 0.0) : std::nextafter(t, std::numeric_limits<double>::infinity());
  }
  return t;
}

namespace {

AdaptationOutcome combine(CurvatureEstimate alpha, CurvatureEstimate beta, double tau_cur, long k,
                          const PolicyConfig& cfg) {
  AdaptationOutcome out;
  const bool a_gate = alpha.correlation > cfg.eps_cor;
  const bool b_gate = beta.correlation > cfg.eps_cor;
  if ((a_gate && !alpha.reliable()) || (b_gate && !beta.reliable())) {
    out.fallback = true;
    out.candidate = tau_cur;
  } else {
    out.candidate = acadmm_candidate(alpha.value.value_or(0.0), alpha.correlation, beta.value.value_or(0.0),
                                     beta.correlation, tau_cur, cfg.eps_cor);
  }
  out.tau = safeguard_clip(out.candidate, tau_cur, k, cfg.c_cg);
  out.alpha = alpha;
  out.beta = beta;
  return out;
}

CurvatureEstimate estimate(double xx, double xy, double yy) {
  return {spectral_estimate(xx, xy, yy), correlation(xx, xy, yy)};
}

double balance(double r_norm, double d_norm, double tau_cur, long k, const PolicyConfig& cfg) {
  double t = tau_cur;
  if (r_norm > cfg.rb_mu * d_norm) {
    t = tau_cur * cfg.rb_factor;
  } else if (d_norm > cfg.rb_mu * r_norm) {
    t = tau_cur / cfg.rb_factor;
  }
  return safeguard_clip(t, tau_cur, k, cfg.c_cg);
}

}  // namespace

AdaptationOutcome acadmm_update(const AdaptationDeltas& d, double tau_cur, long k, const PolicyConfig& cfg) {
  const CurvatureEstimate alpha = estimate(d.du.squaredNorm(), d.du.dot(d.dhl), d.dhl.squaredNorm());
  const CurvatureEstimate beta = estimate(d.dv.squaredNorm(), d.dv.dot(d.dl), d.dl.squaredNorm());
  return combine(alpha, beta, tau_cur, k, cfg);
}

double rb_update(double r_norm, double d_norm, double tau_cur, long k, const PolicyConfig& cfg) {
  return balance(r_norm, d_norm, tau_cur, k, cfg);
}

double crb_update(double r_norm, double d_norm, double tau_cur, long k, const PolicyConfig& cfg) {
  return balance(r_norm, d_norm, tau_cur, k, cfg);
}

AdaptationOutcome aadmm_update(std::span<const AdaptationDeltas> deltas, double tau_cur, long k,
                               const PolicyConfig& cfg) {
  if (deltas.empty()) throw InvalidInput("aadmm_update: no node deltas");
  double uu = 0.0, uh = 0.0, hh = 0.0, vv = 0.0, vl = 0.0, ll = 0.0;
  for (const auto& d : deltas) {
    uu += d.du.squaredNorm();
    uh += d.du.dot(d.dhl);
    hh += d.dhl.squaredNorm();
    vv += d.dv.squaredNorm();
    vl += d.dv.dot(d.dl);
    ll += d.dl.squaredNorm();
  }
  return combine(estimate(uu, uh, hh), estimate(vv, vl, ll), tau_cur, k, cfg);
}

}  // namespace acadmm
