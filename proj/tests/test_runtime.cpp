#include <doctest.h>

#include <algorithm>
#include <bit>
#include <random>

#include "acadmm/datagen.hpp"
#include "acadmm/runtime.hpp"
#include "helpers.hpp"

using namespace acadmm;
using testutil::vec;

namespace {

ConsensusProblem make(LossKind loss, std::size_t nodes, std::size_t samples, std::uint64_t seed, int family = 2) {
  const TargetKind kind = loss == LossKind::squared ? TargetKind::regression : TargetKind::classification;
  const Dataset d = family == 1 ? gen_synthetic1(samples, 6, seed, kind) : gen_synthetic2(samples, 6, nodes, seed, kind);
  ConsensusProblem p;
  p.dimension = 6;
  p.shards = partition(d, nodes, PartitionMode::contiguous);
  p.loss = loss;
  p.regularizer = loss == LossKind::squared   ? Regularizer::elastic_net(10, 10)
                  : loss == LossKind::logistic ? Regularizer::l1(10)
                                               : Regularizer::ridge();
  return p;
}

void check_same(const std::vector<IterationRecord>& a, const std::vector<IterationRecord>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const auto &x = a[j], &y = b[j];
    CHECK(x.k == y.k);
    CHECK(x.residuals.primal_sq == y.residuals.primal_sq);
    CHECK(x.residuals.dual_sq == y.residuals.dual_sq);
    CHECK(x.residuals.sum_u_sq == y.residuals.sum_u_sq);
    CHECK(x.residuals.n_v_sq == y.residuals.n_v_sq);
    CHECK(x.residuals.sum_lambda_sq == y.residuals.sum_lambda_sq);
    REQUIRE(x.residuals.per_node.size() == y.residuals.per_node.size());
    for (std::size_t i = 0; i < x.residuals.per_node.size(); ++i) {
      CHECK(x.residuals.per_node[i].primal_sq == y.residuals.per_node[i].primal_sq);
      CHECK(x.residuals.per_node[i].dual_sq == y.residuals.per_node[i].dual_sq);
    }
    CHECK(x.taus == y.taus);
    CHECK(x.next_taus == y.next_taus);
    CHECK(x.objective == y.objective);
    CHECK(x.h_progress == y.h_progress);
    CHECK(x.inner_warnings == y.inner_warnings);
    REQUIRE(x.adaptation.size() == y.adaptation.size());
    for (std::size_t i = 0; i < x.adaptation.size(); ++i) CHECK(x.adaptation[i].tau == y.adaptation[i].tau);
  }
}

EngineConfig quiet(PolicyKind k) {
  EngineConfig c;
  c.policy.kind = k;
  c.record_wall_clock = false;
  c.maxiter = 300;
  return c;
}

BroadcastMsg first_broadcast(std::size_t d) {
  BroadcastMsg m;
  m.k = 1;
  m.v = DenseVector::Zero(static_cast<Eigen::Index>(d));
  m.v_prev = m.v;
  return m;
}

}  // namespace

TEST_CASE("deterministic_reduce examples") {
  const std::vector<std::pair<std::size_t, double>> two{{1, 0.2}, {0, 0.1}};
  const double expect = 0.1 + 0.2;
  CHECK(std::bit_cast<std::uint64_t>(deterministic_reduce(two)) == std::bit_cast<std::uint64_t>(expect));
  const std::vector<std::pair<std::size_t, double>> single{{0, 1.0 / 3.0}};
  CHECK(deterministic_reduce(single) == 1.0 / 3.0);

  std::mt19937_64 rng(3);
  std::vector<std::pair<std::size_t, double>> vals;
  for (std::size_t i = 0; i < 8; ++i) vals.emplace_back(i, std::uniform_real_distribution<double>(-1e6, 1e6)(rng));
  double sorted = vals[0].second;
  for (std::size_t i = 1; i < 8; ++i) sorted += vals[i].second;
  for (int t = 0; t < 20; ++t) {
    std::shuffle(vals.begin(), vals.end(), rng);
    CHECK(std::bit_cast<std::uint64_t>(deterministic_reduce(vals)) == std::bit_cast<std::uint64_t>(sorted));
  }
  const std::vector<std::pair<std::size_t, DenseVector>> vecs{{1, vec({1, 2})}, {0, vec({0.5, -1})}};
  CHECK(deterministic_reduce(vecs) == vec({1.5, 1}));

  const std::vector<std::pair<std::size_t, double>> gap{{0, 1.0}, {2, 1.0}};
  const std::vector<std::pair<std::size_t, double>> dup{{0, 1.0}, {0, 1.0}};
  CHECK_THROWS_AS(deterministic_reduce(gap), ProtocolError);
  CHECK_THROWS_AS(deterministic_reduce(dup), ProtocolError);
  CHECK_THROWS_AS(deterministic_reduce(std::vector<std::pair<std::size_t, double>>{}), ProtocolError);
}

TEST_CASE("worker_round on a zero-data shard reports tau v") {
  ConsensusProblem p;
  p.dimension = 2;
  p.shards.push_back(testutil::dense_shard(DenseMatrix::Zero(2, 2), {0.0, 0.0}));
  EngineConfig cfg;
  cfg.tau0 = 2.5;
  Worker w(p, 0, cfg);
  BroadcastMsg m = first_broadcast(2);
  m.v = vec({1, -2});
  const auto rep = worker_round(w, m);
  REQUIRE(rep);
  CHECK(!rep->error);
  CHECK(rep->tau == 2.5);
  CHECK((rep->weighted - 2.5 * m.v).norm() <= 1e-14);
}

TEST_CASE("worker protocol: stop flag and stale rounds") {
  const auto p = make(LossKind::squared, 2, 40, 1);
  const EngineConfig cfg = quiet(PolicyKind::acadmm);
  Worker w(p, 0, cfg);
  BroadcastMsg m = first_broadcast(6);
  m.k = 2;
  const auto stale = worker_round(w, m);
  REQUIRE(stale);
  CHECK(stale->error);
  m.k = 1;
  CHECK(worker_round(w, m));
  BroadcastMsg stop;
  stop.k = 2;
  stop.stop = true;
  CHECK_FALSE(worker_round(w, stop));
  CHECK(w.stopped());
  m.k = 2;
  CHECK_FALSE(worker_round(w, m));
}

TEST_CASE("coordinator_round examples and contract") {
  std::vector<WorkerReportMsg> reps(2);
  reps[0].node = 1;
  reps[0].k = 4;
  reps[0].weighted = vec({0});
  reps[0].tau = 3;
  reps[1].node = 0;
  reps[1].k = 4;
  reps[1].weighted = vec({2});
  reps[1].tau = 1;
  const BroadcastMsg b = coordinator_round(reps, 2, 4, vec({7}), Regularizer::none());
  CHECK(b.v[0] == 0.5);
  CHECK(b.v_prev[0] == 7.0);
  CHECK(b.k == 4);

  const std::vector<WorkerReportMsg> missing{reps[0]};
  CHECK_THROWS_AS(coordinator_round(missing, 2, 4, vec({0}), Regularizer::none()), ProtocolError);
  const std::vector<WorkerReportMsg> dup{reps[0], reps[0]};
  CHECK_THROWS_AS(coordinator_round(dup, 2, 4, vec({0}), Regularizer::none()), ProtocolError);
  auto stale = reps;
  stale[1].k = 3;
  CHECK_THROWS_AS(coordinator_round(stale, 2, 4, vec({0}), Regularizer::none()), ProtocolError);
  auto failed = reps;
  failed[0].error = "boom";
  try {
    coordinator_round(failed, 2, 4, vec({0}), Regularizer::none());
    FAIL("expected SubproblemError");
  } catch (const SubproblemError& e) {
    CHECK(e.node() == 1);
    CHECK(e.iteration() == 4);
  }
}

TEST_CASE("coordinator_finish stops on all-zero residuals") {
  std::vector<WorkerStatusMsg> st(3);
  for (std::size_t i = 0; i < 3; ++i) {
    st[i].node = 2 - i;
    st[i].k = 1;
    st[i].next_tau = 1;
  }
  const std::vector<double> taus{1, 1, 1};
  const RoundClose c = coordinator_finish(st, 3, 1, vec({0, 0}), Regularizer::none(), 1e-5, taus, PolicyConfig{});
  CHECK(c.stop);
  CHECK(c.record.residuals.primal_sq == 0.0);
  st.pop_back();
  CHECK_THROWS_AS(coordinator_finish(st, 3, 1, vec({0, 0}), Regularizer::none(), 1e-5, taus, PolicyConfig{}),
                  ProtocolError);
}

TEST_CASE("single worker round trip reproduces the engine") {
  const auto p = make(LossKind::squared, 1, 80, 4, 1);
  const auto cfg = quiet(PolicyKind::acadmm);
  const RunResult a = run(p, cfg);
  const RunResult b = run_distributed(p, cfg, {1, ExecutionMode::sequential});
  check_same(a.records, b.records);
  CHECK(a.v == b.v);
}

TEST_CASE("runtime matches the engine bit for bit, any thread count") {
  for (LossKind loss : {LossKind::squared, LossKind::logistic, LossKind::hinge}) {
    const auto p = make(loss, 8, loss == LossKind::squared ? 400 : 160, 9);
    for (PolicyKind k : {PolicyKind::fixed, PolicyKind::rb, PolicyKind::crb, PolicyKind::aadmm, PolicyKind::acadmm}) {
      auto cfg = quiet(k);
      cfg.maxiter = loss == LossKind::squared ? 300 : 40;
      const RunResult ref = run(p, cfg);
      const RunResult seq = run_distributed(p, cfg, {8, ExecutionMode::sequential});
      const RunResult one = run_distributed(p, cfg, {8, ExecutionMode::parallel_threads, 1});
      const RunResult many = run_distributed(p, cfg, {8, ExecutionMode::parallel_threads, 8});
      check_same(ref.records, seq.records);
      check_same(one.records, many.records);
      check_same(ref.records, many.records);
      CHECK(ref.v == many.v);
      for (std::size_t i = 0; i < 8; ++i) CHECK(ref.workers[i].tau == many.workers[i].tau);
    }
  }
}

TEST_CASE("tree reduction stays close to the ordered result") {
  const auto p = make(LossKind::squared, 8, 400, 2);
  const auto cfg = quiet(PolicyKind::acadmm);
  RunTopology topo{8, ExecutionMode::parallel_threads, 4, false};
  const RunResult a = run(p, cfg);
  const RunResult b = run_distributed(p, cfg, topo);
  CHECK(b.reason == a.reason);
  CHECK((a.v - b.v).norm() <= 1e-6 * (1 + a.v.norm()));
}

TEST_CASE("only aadmm ships deltas; acadmm adapts locally") {
  const auto p = make(LossKind::squared, 3, 90, 5);
  for (PolicyKind k : {PolicyKind::acadmm, PolicyKind::aadmm, PolicyKind::crb, PolicyKind::rb}) {
    const auto cfg = quiet(k);
    std::vector<Worker> ws;
    for (std::size_t i = 0; i < 3; ++i) ws.emplace_back(p, i, cfg);
    BroadcastMsg down = first_broadcast(6);
    DenseVector v = down.v;
    for (long round = 1; round <= 5; ++round) {
      down.k = round;
      std::vector<WorkerReportMsg> reps;
      std::vector<double> taus;
      for (auto& w : ws) {
        reps.push_back(*worker_round(w, down));
        taus.push_back(reps.back().tau);
      }
      const BroadcastMsg dual = coordinator_round(reps, 3, round, v, p.regularizer);
      std::vector<WorkerStatusMsg> st;
      for (auto& w : ws) st.push_back(worker_complete(w, dual));
      for (const auto& s : st) {
        CHECK(s.deltas.has_value() == (k == PolicyKind::aadmm && cfg.policy.adapts_at(round)));
        CHECK(s.adaptation.has_value() == (k == PolicyKind::acadmm && cfg.policy.adapts_at(round)));
      }
      const RoundClose c = coordinator_finish(st, 3, round, dual.v, p.regularizer, cfg.tol, taus, cfg.policy);
      const bool global = k == PolicyKind::rb || k == PolicyKind::aadmm;
      CHECK(c.global_tau.has_value() == (global && cfg.policy.adapts_at(round) && !c.stop));
      v = dual.v;
      down = BroadcastMsg{};
      down.v = v;
      down.v_prev = dual.v_prev;
      down.tau = c.global_tau;
    }
  }
}

TEST_CASE("acadmm tau depends only on local deltas") {
  // Same node-0 deltas must give the same node-0 tau whatever the other
  // nodes hold; check by recomputing from the probe the engine exposes.
  const auto p = make(LossKind::squared, 4, 200, 8);
  auto cfg = quiet(PolicyKind::acadmm);
  std::vector<std::tuple<long, std::size_t, double, AdaptationDeltas>> seen;
  cfg.on_adaptation = [&](const AdaptationProbe& pr) { seen.emplace_back(pr.k, pr.node, pr.state.tau, pr.deltas); };
  const RunResult r = run(p, cfg);
  REQUIRE(!seen.empty());
  for (const auto& [k, node, tau, d] : seen) {
    const auto& rec = r.records[static_cast<std::size_t>(k - 1)];
    CHECK(acadmm_update(d, tau, k, cfg.policy).tau == rec.next_taus[node]);
  }
}

TEST_CASE("run_distributed rejects a mismatched topology") {
  const auto p = make(LossKind::squared, 2, 40, 1);
  CHECK_THROWS_AS(run_distributed(p, quiet(PolicyKind::fixed), {3, ExecutionMode::sequential}), InvalidInput);
}
