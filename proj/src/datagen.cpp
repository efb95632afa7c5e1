#include "acadmm/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace acadmm {
namespace {

using Rng = std::mt19937_64;

DenseVector sparse_truth(std::size_t features, Rng& rng) {
  std::normal_distribution<double> normal;
  const auto nnz = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(kTruthDensity * features)));
  std::vector<std::size_t> idx(features);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  DenseVector w = DenseVector::Zero(static_cast<Eigen::Index>(features));
  for (std::size_t j = 0; j < nnz; ++j) w[static_cast<Eigen::Index>(idx[j])] = normal(rng);
  return w;
}

double make_target(const DenseVector& x, const DenseVector& w, TargetKind kind, Rng& rng) {
  const double m = x.dot(w);
  if (kind == TargetKind::classification) return m >= 0.0 ? 1.0 : -1.0;
  std::normal_distribution<double> noise(0.0, kNoiseSd);
  return m + noise(rng);
}

void append_dense_row(SparseMatrix& m, const DenseVector& x) {
  std::vector<SparseMatrix::Entry> row;
  row.reserve(static_cast<std::size_t>(x.size()));
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (x[j] != 0.0) row.push_back({static_cast<std::size_t>(j), x[j]});
  m.append_row(row);
}

void check_sizes(std::size_t samples, std::size_t features) {
  if (samples < 1 || features < 1) throw InvalidInput("generator: samples and features must be >= 1");
}

}  // namespace

double component_scale(int component) {
  return std::pow(kScaleSpread, static_cast<double>(component) / static_cast<double>(kComponents - 1));
}

Dataset gen_synthetic1(std::size_t samples, std::size_t features, std::uint64_t seed, TargetKind kind) {
  check_sizes(samples, features);
  Rng rng(seed);
  std::normal_distribution<double> normal;
  const DenseVector w = sparse_truth(features, rng);
  Dataset d;
  d.features = SparseMatrix(features);
  d.targets.reserve(samples);
  DenseVector x(static_cast<Eigen::Index>(features));
  for (std::size_t r = 0; r < samples; ++r) {
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = normal(rng);
    append_dense_row(d.features, x);
    d.targets.push_back(make_target(x, w, kind, rng));
  }
  return d;
}

Dataset gen_synthetic2(std::size_t samples, std::size_t features, std::size_t nodes, std::uint64_t seed,
                       TargetKind kind) {
  check_sizes(samples, features);
  if (nodes < 1) throw InvalidInput("generator: nodes must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  const DenseVector w = sparse_truth(features, rng);
  const auto dim = static_cast<Eigen::Index>(features);
  std::vector<DenseVector> means(kComponents, DenseVector(dim));
  for (auto& mu : means)
    for (Eigen::Index j = 0; j < dim; ++j) mu[j] = normal(rng);

  Dataset d;
  d.features = SparseMatrix(features);
  d.targets.reserve(samples);
  d.block_of.reserve(samples);
  DenseVector x(dim);
  for (std::size_t i = 0; i < nodes; ++i) {
    std::vector<int> comps;
    if (nodes >= static_cast<std::size_t>(kComponents)) {
      comps.push_back(static_cast<int>(i % kComponents));
    } else {
      for (int c = 0; c < kComponents; ++c)
        if (static_cast<std::size_t>(c) % nodes == i) comps.push_back(c);
    }
    const std::size_t begin = i * samples / nodes;
    const std::size_t count = (i + 1) * samples / nodes - begin;
    for (std::size_t j = 0; j < comps.size(); ++j) {
      const int c = comps[j];
      const double s = component_scale(c);
      const std::size_t sub = (j + 1) * count / comps.size() - j * count / comps.size();
      for (std::size_t r = 0; r < sub; ++r) {
        for (Eigen::Index t = 0; t < dim; ++t) x[t] = s * (means[static_cast<std::size_t>(c)][t] + normal(rng));
        append_dense_row(d.features, x);
        d.targets.push_back(make_target(x, w, kind, rng));
        d.block_of.push_back(i);
      }
    }
  }
  return d;
}

}  // namespace acadmm
