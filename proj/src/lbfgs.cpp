#include "acadmm/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace acadmm {

namespace {

struct Point {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;  // directional derivative along d
  DenseVector x;
  DenseVector grad;
};

class LineSearch {
 public:
  LineSearch(const SmoothObjective& f, const DenseVector& x, const DenseVector& d, double f0, double slope0,
             const LbfgsOptions& opt)
      : f_(f), x_(x), d_(d), f0_(f0), slope0_(slope0), opt_(opt) {
    // Below this the function value carries no information about progress.
    flat_ = 1e-12 * (1.0 + std::abs(f0));
  }

  bool search(double initial_step, Point& out) {
    Point prev;
    prev.step = 0.0;
    prev.value = f0_;
    prev.slope = slope0_;
    double a = initial_step;
    for (int i = 0; i < opt_.max_line_search; ++i) {
      Point cur = eval(a);
      if (!std::isfinite(cur.value)) {
        a = 0.5 * (prev.step + a);
        continue;
      }
      if (!sufficient(cur) || (i > 0 && cur.value >= prev.value && !flat(cur)))
        return zoom(prev, cur, out);
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) return zoom(cur, prev, out);
      prev = std::move(cur);
      a *= 2.0;
    }
    return false;
  }

 private:
  Point eval(double a) {
    ++evals_;
    Point p;
    p.step = a;
    p.x = x_ + a * d_;
    p.grad.resize(x_.size());
    p.value = f_(p.x, p.grad);
    p.slope = p.grad.dot(d_);
    return p;
  }

  bool flat(const Point& p) const { return std::abs(p.value - f0_) <= flat_; }

  bool sufficient(const Point& p) const {
    if (p.value <= f0_ + opt_.c1 * p.step * slope0_) return true;
    return flat(p) && p.slope <= (2.0 * opt_.c1 - 1.0) * slope0_;
  }

  bool zoom(Point lo, Point hi, Point& out) {
    for (int j = 0; j < opt_.max_line_search; ++j) {
      const double a = interpolate(lo, hi);
      Point cur = eval(a);
      if (!std::isfinite(cur.value) || !sufficient(cur) || (cur.value >= lo.value && !flat(cur))) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.slope) <= -opt_.c2 * slope0_) {
          out = std::move(cur);
          return true;
        }
        if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
      if (std::abs(hi.step - lo.step) <= 1e-16 * std::max(1.0, std::abs(lo.step))) break;
    }
    // Bracket collapsed; accept the best point if it made any progress.
    if (lo.step > 0.0 && lo.value <= f0_) {
      out = std::move(lo);
      return true;
    }
    return false;
  }

  // Safeguarded cubic interpolation inside the bracket.
  static double interpolate(const Point& lo, const Point& hi) {
    const double a0 = lo.step, a1 = hi.step;
    const double width = a1 - a0;
    double a = 0.5 * (a0 + a1);
    if (std::isfinite(hi.value)) {
      const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a0 - a1);
      const double disc = d1 * d1 - lo.slope * hi.slope;
      if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), a1 - a0);
        const double denom = hi.slope - lo.slope + 2.0 * d2;
        if (denom != 0.0) {
          const double c = a1 - (a1 - a0) * (hi.slope + d2 - d1) / denom;
          if (std::isfinite(c)) a = c;
        }
      }
    }
    const double lo_b = std::min(a0, a1) + 0.1 * std::abs(width);
    const double hi_b = std::max(a0, a1) - 0.1 * std::abs(width);
    if (a < lo_b || a > hi_b) a = 0.5 * (a0 + a1);
    return a;
  }

  const SmoothObjective& f_;
  const DenseVector& x_;
  const DenseVector& d_;
  double f0_;
  double slope0_;
  const LbfgsOptions& opt_;
  double flat_;
  int evals_ = 0;
};

}  // namespace

LbfgsResult minimize_lbfgs(const SmoothObjective& f, DenseVector x0, const LbfgsOptions& opt) {
  LbfgsResult res;
  DenseVector g(x0.size());
  double fx = f(x0, g);
  res.x = std::move(x0);
  res.initial_grad_norm = g.norm();
  res.grad_norm = res.initial_grad_norm;
  res.value = fx;
  if (res.grad_norm <= opt.grad_tol) {
    res.converged = true;
    return res;
  }

  std::deque<DenseVector> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> alpha(static_cast<std::size_t>(opt.memory));

  for (int it = 0; it < opt.max_iters; ++it) {
    // Two-loop recursion.
    DenseVector q = -g;
    const std::size_t m = s_hist.size();
    for (std::size_t i = m; i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (m > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    double slope = g.dot(q);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      q = -g;
      slope = -g.squaredNorm();
    }

    const double step0 = (m == 0) ? std::min(1.0, 1.0 / res.grad_norm) : 1.0;
    LineSearch ls(f, res.x, q, fx, slope, opt);
    Point next;
    if (!ls.search(step0, next)) break;

    DenseVector s = next.x - res.x;
    DenseVector y = next.grad - g;
    const double sy = s.dot(y);
    res.x = std::move(next.x);
    g = std::move(next.grad);
    fx = next.value;
    res.iterations = it + 1;
    res.grad_norm = g.norm();
    res.value = fx;
    if (res.grad_norm <= opt.grad_tol) {
      res.converged = true;
      return res;
    }
    if (sy > std::numeric_limits<double>::epsilon() * y.squaredNorm()) {
      if (static_cast<int>(s_hist.size()) == opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      rho_hist.push_back(1.0 / sy);
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
    }
  }
  res.converged = res.grad_norm <= opt.grad_tol;
  return res;
}

}  // namespace acadmm
