#include "acadmm/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "acadmm/io/libsvm.hpp"

namespace acadmm {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(x))
    throw InvalidInput(std::string(key) + ": expected a number, got '" + s + "'");
  return x;
}

long to_long(std::string_view key, std::string_view v) {
  const std::string s(v);
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InvalidInput(std::string(key) + ": expected an integer, got '" + s + "'");
  return x;
}

std::size_t to_count(std::string_view key, std::string_view v) {
  const long x = to_long(key, v);
  if (x < 0) throw InvalidInput(std::string(key) + " must be >= 0");
  return static_cast<std::size_t>(x);
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw InvalidInput(std::string(key) + ": expected true/false, got '" + std::string(v) + "'");
}

TargetKind target_kind(LossKind k) {
  return k == LossKind::squared ? TargetKind::regression : TargetKind::classification;
}

}  // namespace

GeneratorSpec parse_generator_spec(std::string_view s) {
  GeneratorSpec g;
  const auto colon = s.find(':');
  const std::string_view name = s.substr(0, colon);
  if (name == "synthetic1") {
    g.family = 1;
  } else if (name == "synthetic2") {
    g.family = 2;
  } else {
    throw InvalidInput("unknown generator '" + std::string(name) + "'");
  }
  if (colon == std::string_view::npos) return g;
  const std::string_view dims = s.substr(colon + 1);
  const auto x = dims.find('x');
  if (x == std::string_view::npos) throw InvalidInput("generator size must look like 512x10");
  g.samples = to_count("gen", dims.substr(0, x));
  g.features = to_count("gen", dims.substr(x + 1));
  if (g.samples < 1 || g.features < 1) throw InvalidInput("generator sizes must be >= 1");
  return g;
}

std::string to_string(const GeneratorSpec& g) {
  return "synthetic" + std::to_string(g.family) + ":" + std::to_string(g.samples) + "x" + std::to_string(g.features);
}

RunnerMode parse_runner_mode(std::string_view s) {
  if (s == "engine" || s == "serial") return RunnerMode::engine;
  if (s == "sequential") return RunnerMode::sequential;
  if (s == "parallel" || s == "threads") return RunnerMode::parallel;
  throw InvalidInput("unknown mode '" + std::string(s) + "'");
}

std::string_view to_string(RunnerMode m) {
  switch (m) {
    case RunnerMode::engine: return "engine";
    case RunnerMode::sequential: return "sequential";
    case RunnerMode::parallel: return "parallel";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (workers < 1) throw InvalidInput("workers must be >= 1");
  if (!data && !gen) throw InvalidInput("need a data file (--data) or a generator (--gen)");
  if (data && gen) throw InvalidInput("--data and --gen are exclusive");
  if (!(rho1 >= 0.0) || !(rho2 >= 0.0)) throw InvalidInput("rho must be >= 0");
  if (!(svm_c >= 0.0)) throw InvalidInput("svm-c must be >= 0");
  if (threads < 0) throw InvalidInput("threads must be >= 0");
  engine.validate();
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  const std::string_view v = value;
  auto& pol = cfg.engine.policy;
  if (key == "problem") {
    cfg.problem = parse_loss_kind(v);
  } else if (key == "data") {
    cfg.data = std::filesystem::path(value);
    cfg.gen.reset();
  } else if (key == "data-dim") {
    cfg.data_dimension = to_count(key, v);
  } else if (key == "gen") {
    cfg.gen = parse_generator_spec(v);
    cfg.data.reset();
  } else if (key == "workers") {
    cfg.workers = to_count(key, v);
  } else if (key == "partition") {
    cfg.partition = parse_partition_mode(v);
  } else if (key == "policy") {
    pol.kind = parse_policy_kind(v);
  } else if (key == "tau0") {
    cfg.engine.tau0 = to_double(key, v);
  } else if (key == "tol") {
    cfg.engine.tol = to_double(key, v);
  } else if (key == "maxiter") {
    cfg.engine.maxiter = to_long(key, v);
  } else if (key == "rho1") {
    cfg.rho1 = to_double(key, v);
  } else if (key == "rho2") {
    cfg.rho2 = to_double(key, v);
  } else if (key == "rho") {
    cfg.rho1 = cfg.rho2 = to_double(key, v);
  } else if (key == "svm-c") {
    cfg.svm_c = to_double(key, v);
  } else if (key == "tf") {
    pol.t_f = static_cast<int>(to_long(key, v));
  } else if (key == "eps-cor") {
    pol.eps_cor = to_double(key, v);
  } else if (key == "c-cg") {
    pol.c_cg = to_double(key, v);
  } else if (key == "rb-mu") {
    pol.rb_mu = to_double(key, v);
  } else if (key == "rb-factor") {
    pol.rb_factor = to_double(key, v);
  } else if (key == "seed") {
    cfg.engine.seed = static_cast<std::uint64_t>(to_count(key, v));
  } else if (key == "metrics") {
    cfg.metrics = std::filesystem::path(value);
  } else if (key == "summary") {
    cfg.summary = std::filesystem::path(value);
  } else if (key == "mode") {
    cfg.mode = parse_runner_mode(v);
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(to_long(key, v));
  } else if (key == "deterministic") {
    cfg.deterministic_reduction = to_bool(key, v);
  } else if (key == "wall-clock") {
    cfg.engine.record_wall_clock = to_bool(key, v);
  } else if (key == "no-wall-clock") {
    cfg.engine.record_wall_clock = !to_bool(key, v);
  } else if (key == "inner-tol") {
    cfg.engine.inner.tolerance = to_double(key, v);
  } else if (key == "inner-maxiter") {
    cfg.engine.inner.max_inner_iters = static_cast<int>(to_long(key, v));
  } else {
    throw InvalidInput("unknown setting '" + std::string(key) + "'");
  }
}

void apply_config_text(ExperimentConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    const std::string body = trim(s);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    try {
      apply_setting(cfg, key, std::string_view(body).substr(eq + 1));
    } catch (const InvalidInput& e) {
      throw InvalidInput("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path.string() + "'");
  apply_config_text(cfg, in);
}

const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& presets() {
  static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> table = [] {
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> m;
    const std::pair<const char*, const char*> problems[] = {{"enet", "enet"}, {"logreg", "logreg"}, {"svm", "svm"}};
    for (const auto& [name, problem] : problems) {
      m[std::string(name) + "-synthetic1"] = {{"problem", problem},  {"gen", "synthetic1:512x10"},
                                              {"workers", "4"},      {"partition", "contiguous"},
                                              {"rho", "10"},         {"tau0", "1"},
                                              {"tol", "1e-5"},       {"maxiter", "1000"}};
      m[std::string(name) + "-synthetic2"] = {{"problem", problem},  {"gen", "synthetic2:800x10"},
                                              {"workers", "8"},      {"partition", "contiguous"},
                                              {"rho", "10"},         {"tau0", "1"},
                                              {"tol", "1e-5"},       {"maxiter", "1000"}};
    }
    return m;
  }();
  return table;
}

void apply_preset(ExperimentConfig& cfg, std::string_view name) {
  const auto it = presets().find(std::string(name));
  if (it == presets().end()) throw InvalidInput("unknown preset '" + std::string(name) + "'");
  for (const auto& [k, v] : it->second) apply_setting(cfg, k, v);
}

Dataset load_dataset(const ExperimentConfig& cfg) {
  if (cfg.data) return to_dataset(read_libsvm(*cfg.data, cfg.data_dimension));
  if (!cfg.gen) throw InvalidInput("no data source");
  const auto& g = *cfg.gen;
  const TargetKind kind = target_kind(cfg.problem);
  if (g.family == 1) return gen_synthetic1(g.samples, g.features, cfg.engine.seed, kind);
  return gen_synthetic2(g.samples, g.features, cfg.workers, cfg.engine.seed, kind);
}

Regularizer regularizer_for(const ExperimentConfig& cfg) {
  switch (cfg.problem) {
    case LossKind::squared: return Regularizer::elastic_net(cfg.rho1, cfg.rho2);
    case LossKind::logistic: return Regularizer::l1(cfg.rho1);
    case LossKind::hinge: return Regularizer::ridge();
  }
  throw InternalError("unknown problem kind");
}

ConsensusProblem build_problem(const ExperimentConfig& cfg, const Dataset& data) {
  ConsensusProblem p;
  p.dimension = data.dimension();
  p.shards = partition(data, cfg.workers, cfg.partition);
  p.loss = cfg.problem;
  p.regularizer = regularizer_for(cfg);
  p.svm_c = cfg.svm_c;
  p.validate();
  return p;
}

RunResult execute(const ConsensusProblem& problem, const ExperimentConfig& cfg) {
  if (cfg.mode == RunnerMode::engine) return run(problem, cfg.engine);
  RunTopology topo;
  topo.workers = problem.nodes();
  topo.mode = cfg.mode == RunnerMode::sequential ? ExecutionMode::sequential : ExecutionMode::parallel_threads;
  topo.threads = cfg.threads;
  topo.deterministic_reduction = cfg.deterministic_reduction;
  return run_distributed(problem, cfg.engine, topo);
}

std::filesystem::path jsonl_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension(".jsonl");
  return p;
}

std::string summary_json(const ExperimentConfig& cfg, const ExperimentSummary& s) {
  nlohmann::ordered_json j;
  j["iterations"] = s.iterations;
  j["stop_reason"] = std::string(to_string(s.reason));
  j["converged"] = s.reason == StopReason::converged;
  j["primal_res_sq"] = s.primal_res_sq;
  j["dual_res_sq"] = s.dual_res_sq;
  j["objective"] = s.objective;
  j["h_progress"] = s.h_progress;
  j["total_wall_ms"] = s.total_wall_ms;
  j["inner_warnings"] = s.inner_warnings;
  auto& c = j["config"];
  c["problem"] = std::string(to_string(cfg.problem));
  if (cfg.data) c["data"] = cfg.data->string();
  if (cfg.gen) c["gen"] = to_string(*cfg.gen);
  c["workers"] = cfg.workers;
  c["partition"] = std::string(to_string(cfg.partition));
  c["policy"] = std::string(to_string(cfg.engine.policy.kind));
  c["tau0"] = cfg.engine.tau0;
  c["tol"] = cfg.engine.tol;
  c["maxiter"] = cfg.engine.maxiter;
  c["rho1"] = cfg.rho1;
  c["rho2"] = cfg.rho2;
  c["svm_c"] = cfg.svm_c;
  c["tf"] = cfg.engine.policy.t_f;
  c["eps_cor"] = cfg.engine.policy.eps_cor;
  c["c_cg"] = cfg.engine.policy.c_cg;
  c["seed"] = cfg.engine.seed;
  c["mode"] = std::string(to_string(cfg.mode));
  c["threads"] = cfg.threads;
  return j.dump(2);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Dataset data = load_dataset(cfg);
  const ConsensusProblem problem = build_problem(cfg, data);

  ExperimentResult out;
  const auto t0 = std::chrono::steady_clock::now();
  out.run = execute(problem, cfg);
  const double total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  out.rows.reserve(out.run.records.size());
  for (const auto& rec : out.run.records) {
    out.rows.push_back(to_metrics_row(rec));
    out.summary.inner_warnings += rec.inner_warnings;
  }
  auto& s = out.summary;
  s.iterations = out.run.iterations();
  s.reason = out.run.reason;
  if (!out.run.records.empty()) {
    const auto& last = out.run.records.back();
    s.primal_res_sq = last.residuals.primal_sq;
    s.dual_res_sq = last.residuals.dual_sq;
    s.objective = last.objective;
    s.h_progress = last.h_progress;
  }
  s.total_wall_ms = cfg.engine.record_wall_clock ? total_ms : 0.0;
  out.exit_code = s.reason == StopReason::converged ? 0 : 2;

  if (cfg.metrics) {
    std::ofstream csv(*cfg.metrics);
    if (!csv) throw InvalidInput("cannot write '" + cfg.metrics->string() + "'");
    write_metrics_csv(csv, out.rows);
    std::ofstream jl(jsonl_path(*cfg.metrics));
    if (!jl) throw InvalidInput("cannot write '" + jsonl_path(*cfg.metrics).string() + "'");
    write_metrics_jsonl(jl, out.rows);
  }
  if (cfg.summary) {
    std::ofstream f(*cfg.summary);
    if (!f) throw InvalidInput("cannot write '" + cfg.summary->string() + "'");
    f << summary_json(cfg, s) << '\n';
  }
  return out;
}

std::vector<CompareEntry> compare_policies(const ExperimentConfig& cfg) {
  cfg.validate();
  const Dataset data = load_dataset(cfg);
  const ConsensusProblem problem = build_problem(cfg, data);
  std::vector<CompareEntry> out;
  for (PolicyKind k : {PolicyKind::fixed, PolicyKind::rb, PolicyKind::aadmm, PolicyKind::crb, PolicyKind::acadmm}) {
    ExperimentConfig c = cfg;
    c.engine.policy.kind = k;
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r = execute(problem, c);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back({k, r.iterations(), r.reason == StopReason::converged, sec});
  }
  return out;
}

std::string format_cell(const CompareEntry& e) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%ld%s(%.3g)", e.iterations, e.converged ? "" : "+", e.seconds);
  return buf;
}

void print_compare_table(std::ostream& out, std::string_view dataset, std::size_t samples, std::size_t features,
                         const std::vector<CompareEntry>& entries) {
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-12s", "dataset", "size");
  out << line;
  for (const auto& e : entries) {
    std::snprintf(line, sizeof line, " %14s", std::string(to_string(e.policy)).c_str());
    out << line;
  }
  out << '\n';
  const std::string size = std::to_string(samples) + "x" + std::to_string(features);
  std::snprintf(line, sizeof line, "%-12s %-12s", std::string(dataset).c_str(), size.c_str());
  out << line;
  for (const auto& e : entries) {
    std::snprintf(line, sizeof line, " %14s", format_cell(e).c_str());
    out << line;
  }
  out << '\n';
}

}  // namespace acadmm
