#include "acadmm/problem.hpp"

#include <cmath>
#include <string>

namespace acadmm {

std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::squared: return "enet";
    case LossKind::logistic: return "logreg";
    case LossKind::hinge: return "svm";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view s) {
  if (s == "enet" || s == "elastic-net" || s == "squared") return LossKind::squared;
  if (s == "logreg" || s == "logistic") return LossKind::logistic;
  if (s == "svm" || s == "hinge") return LossKind::hinge;
  throw InvalidInput("unknown problem kind '" + std::string(s) + "'");
}

std::string_view to_string(RegularizerKind k) {
  switch (k) {
    case RegularizerKind::none: return "none";
    case RegularizerKind::elastic_net: return "elastic-net";
    case RegularizerKind::l1: return "l1";
    case RegularizerKind::ridge: return "ridge";
  }
  return "?";
}

double Regularizer::value(const DenseVector& v) const {
  switch (kind) {
    case RegularizerKind::none: return 0.0;
    case RegularizerKind::elastic_net: return rho1 * v.lpNorm<1>() + 0.5 * rho2 * v.squaredNorm();
    case RegularizerKind::l1: return rho1 * v.lpNorm<1>();
    case RegularizerKind::ridge: return 0.5 * v.squaredNorm();
  }
  return 0.0;
}

void Regularizer::validate() const {
  if (!(rho1 >= 0.0) || !(rho2 >= 0.0) || !std::isfinite(rho1) || !std::isfinite(rho2))
    throw InvalidInput("regularizer weights must be finite and >= 0");
}

void ConsensusProblem::validate() const {
  if (shards.empty()) throw InvalidInput("problem needs at least one worker shard");
  if (dimension == 0) throw InvalidInput("problem dimension must be positive");
  regularizer.validate();
  if (!(svm_c >= 0.0) || !std::isfinite(svm_c)) throw InvalidInput("svm C must be finite and >= 0");
  for (std::size_t i = 0; i < shards.size(); ++i) {
    const auto& s = shards[i];
    if (s.data.cols() != dimension)
      throw InvalidInput("shard " + std::to_string(i) + " has dimension " + std::to_string(s.data.cols()) +
                         ", expected " + std::to_string(dimension));
    if (s.targets.size() != s.data.rows())
      throw InvalidInput("shard " + std::to_string(i) + ": targets length differs from data rows");
    for (double t : s.targets) {
      if (!std::isfinite(t)) throw InvalidInput("shard " + std::to_string(i) + ": non-finite target");
      if (loss != LossKind::squared && t != 1.0 && t != -1.0)
        throw InvalidInput("shard " + std::to_string(i) + ": classification labels must be -1 or +1");
    }
  }
}

namespace {

// log(1 + exp(-m)) without overflow.
double log1pexp_neg(double m) { return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)); }

// d/dm log(1 + exp(-m)) = -1 / (1 + exp(m))
double dlog1pexp_neg(double m) {
  if (m > 0) {
    const double e = std::exp(-m);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(m));
}

void check_dim(const ConsensusProblem& p, const DenseVector& v) {
  if (static_cast<std::size_t>(v.size()) != p.dimension)
    throw InvalidInput("vector length " + std::to_string(v.size()) + " differs from problem dimension " +
                       std::to_string(p.dimension));
}

}  // namespace

double loss_value(const ConsensusProblem& problem, std::size_t node, const DenseVector& u) {
  check_dim(problem, u);
  const auto& shard = problem.shards.at(node);
  double s = 0.0;
  for (std::size_t j = 0; j < shard.samples(); ++j) {
    const double z = shard.data.row_dot(j, u);
    const double c = shard.targets[j];
    switch (problem.loss) {
      case LossKind::squared: s += 0.5 * (z - c) * (z - c); break;
      case LossKind::logistic: s += log1pexp_neg(c * z); break;
      case LossKind::hinge: s += problem.svm_c * std::max(1.0 - c * z, 0.0); break;
    }
  }
  return s;
}

DenseVector loss_gradient(const ConsensusProblem& problem, std::size_t node, const DenseVector& u) {
  check_dim(problem, u);
  const auto& shard = problem.shards.at(node);
  DenseVector g = DenseVector::Zero(u.size());
  for (std::size_t j = 0; j < shard.samples(); ++j) {
    const double z = shard.data.row_dot(j, u);
    const double c = shard.targets[j];
    double w = 0.0;
    switch (problem.loss) {
      case LossKind::squared: w = z - c; break;
      case LossKind::logistic: w = c * dlog1pexp_neg(c * z); break;
      case LossKind::hinge: w = (1.0 - c * z > 0.0) ? -problem.svm_c * c : 0.0; break;
    }
    if (w != 0.0) shard.data.axpy_row(j, w, g);
  }
  return g;
}

double evaluate_objective(const ConsensusProblem& problem, const DenseVector& v) {
  check_dim(problem, v);
  double s = 0.0;
  for (std::size_t i = 0; i < problem.nodes(); ++i) s += loss_value(problem, i, v);
  return s + problem.regularizer.value(v);
}

std::pair<double, double> local_norms(const WorkerState& state) {
  return {state.u.squaredNorm(), state.lambda.squaredNorm()};
}

}  // namespace acadmm
