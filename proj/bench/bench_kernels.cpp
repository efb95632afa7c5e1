// Serial reference vs OpenMP kernels, and sequential vs threaded runtime.

#include <benchmark/benchmark.h>

#include <random>

#include "acadmm/datagen.hpp"
#include "acadmm/kernels.hpp"
#include "acadmm/problem.hpp"
#include "acadmm/runtime.hpp"

using namespace acadmm;

namespace {

SparseMatrix random_csr(std::size_t rows, std::size_t cols, double density) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n;
  DenseMatrix d = DenseMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      if (u(rng) < density) d(i, j) = n(rng);
  return SparseMatrix::from_dense(d);
}

const SparseMatrix& matrix() {
  static const SparseMatrix a = random_csr(20000, 400, 0.05);
  return a;
}

template <auto Kernel>
void bm_matvec(benchmark::State& st) {
  const SparseMatrix& a = matrix();
  const DenseVector x = DenseVector::Ones(static_cast<Eigen::Index>(a.cols()));
  DenseVector y;
  for (auto _ : st) {
    Kernel(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <auto Kernel>
void bm_matvec_t(benchmark::State& st) {
  const SparseMatrix& a = matrix();
  const DenseVector x = DenseVector::Ones(static_cast<Eigen::Index>(a.rows()));
  DenseVector y;
  for (auto _ : st) {
    Kernel(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <auto Kernel>
void bm_gram(benchmark::State& st) {
  const SparseMatrix& a = matrix();
  DenseMatrix g;
  for (auto _ : st) {
    Kernel(a, g);
    benchmark::DoNotOptimize(g.data());
  }
}

void bm_runtime(benchmark::State& st) {
  const std::size_t nodes = 8;
  const Dataset data = gen_synthetic2(8000, 50, nodes, 0);
  ConsensusProblem p;
  p.dimension = data.dimension();
  p.loss = LossKind::squared;
  p.regularizer = Regularizer::elastic_net(10.0, 10.0);
  p.shards = partition(data, nodes, PartitionMode::contiguous);
  EngineConfig cfg;
  cfg.policy.kind = PolicyKind::acadmm;
  cfg.maxiter = 50;
  cfg.tol = 1e-300;
  RunTopology topo;
  topo.workers = nodes;
  topo.mode = st.range(0) == 0 ? ExecutionMode::sequential : ExecutionMode::parallel_threads;
  topo.threads = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(run_distributed(p, cfg, topo).records.size());
}

}  // namespace

BENCHMARK(bm_matvec<kernels::serial::csr_matvec>)->Name("matvec/serial");
BENCHMARK(bm_matvec<kernels::parallel::csr_matvec>)->Name("matvec/parallel");
BENCHMARK(bm_matvec_t<kernels::serial::csr_matvec_transpose>)->Name("matvec_transpose/serial");
BENCHMARK(bm_matvec_t<kernels::parallel::csr_matvec_transpose>)->Name("matvec_transpose/parallel");
BENCHMARK(bm_gram<kernels::serial::csr_gram>)->Name("gram/serial");
BENCHMARK(bm_gram<kernels::parallel::csr_gram>)->Name("gram/parallel");
BENCHMARK(bm_runtime)->Name("runtime/threads")->Arg(0)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
