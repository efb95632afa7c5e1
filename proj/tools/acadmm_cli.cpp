// acadmm: run one experiment, compare the five policies, or write a
// synthetic dataset in LIBSVM format.
//
//   acadmm run --preset enet-synthetic2 --policy acadmm --metrics m.csv
//   acadmm compare --preset enet-synthetic1
//   acadmm gen --gen synthetic2:800x10 --workers 8 --out s2.libsvm

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acadmm/experiment.hpp"
#include "acadmm/io/libsvm.hpp"

namespace {

// Applied in this order, so --rho1 / --rho2 refine --rho.
const std::vector<std::pair<std::string, std::string>> kFlags = {
    {"problem", "enet | logreg | svm"},
    {"data", "LIBSVM file"},
    {"data-dim", "feature dimension override for --data"},
    {"gen", "synthetic1:NxD or synthetic2:NxD"},
    {"workers", "number of worker shards"},
    {"partition", "round-robin | contiguous"},
    {"policy", "fixed | rb | crb | aadmm | acadmm"},
    {"tau0", "initial penalty"},
    {"tol", "stopping tolerance"},
    {"maxiter", "iteration cap"},
    {"rho", "sets rho1 and rho2"},
    {"rho1", "l1 weight"},
    {"rho2", "l2 weight (elastic net)"},
    {"svm-c", "hinge weight C"},
    {"tf", "adaptation period"},
    {"eps-cor", "correlation threshold"},
    {"c-cg", "penalty change bound constant"},
    {"rb-mu", "residual ratio threshold (rb, crb)"},
    {"rb-factor", "multiplicative step (rb, crb)"},
    {"seed", "random seed"},
    {"metrics", "per-iteration CSV (a .jsonl mirror is written beside it)"},
    {"summary", "summary JSON"},
    {"mode", "engine | sequential | parallel"},
    {"threads", "worker threads in parallel mode (0: one per worker)"},
    {"deterministic", "ordered reductions (true | false)"},
    {"inner-tol", "subproblem tolerance"},
    {"inner-maxiter", "subproblem iteration cap"},
};

struct Options {
  std::string preset;
  std::string config;
  bool no_wall_clock = false;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> opts;
};

void add_experiment_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--preset", o.preset, "desk preset name (see `acadmm presets`)");
  cmd.add_option("--config", o.config, "flat key=value config file; flags override it");
  for (const auto& [name, help] : kFlags) o.opts[name] = cmd.add_option("--" + name, o.values[name], help);
  cmd.add_flag("--no-wall-clock", o.no_wall_clock, "record 0 instead of wall time (byte-stable metrics)");
}

acadmm::ExperimentConfig resolve(const Options& o) {
  acadmm::ExperimentConfig cfg;
  if (!o.preset.empty()) acadmm::apply_preset(cfg, o.preset);
  if (!o.config.empty()) acadmm::apply_config_file(cfg, o.config);
  for (const auto& [name, _] : kFlags)
    if (o.opts.at(name)->count() > 0) acadmm::apply_setting(cfg, name, o.values.at(name));
  if (o.no_wall_clock) cfg.engine.record_wall_clock = false;
  return cfg;
}

std::string dataset_label(const acadmm::ExperimentConfig& cfg) {
  if (cfg.gen) return cfg.gen->family == 1 ? "Synthetic1" : "Synthetic2";
  return cfg.data ? cfg.data->filename().string() : "?";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus ADMM with adaptive penalties"};
  app.require_subcommand(1);

  Options run_opts, cmp_opts, gen_opts;
  auto* run_cmd = app.add_subcommand("run", "run one experiment");
  add_experiment_options(*run_cmd, run_opts);
  auto* cmp_cmd = app.add_subcommand("compare", "run fixed, rb, aadmm, crb and acadmm on one dataset");
  add_experiment_options(*cmp_cmd, cmp_opts);
  auto* gen_cmd = app.add_subcommand("gen", "write a synthetic dataset as LIBSVM text");
  add_experiment_options(*gen_cmd, gen_opts);
  std::string out_path;
  gen_cmd->add_option("--out", out_path, "output file")->required();
  app.add_subcommand("presets", "list desk presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("presets")) {
      for (const auto& [name, settings] : acadmm::presets()) {
        std::cout << name << ':';
        for (const auto& [k, v] : settings) std::cout << ' ' << k << '=' << v;
        std::cout << '\n';
      }
      return 0;
    }
    if (run_cmd->parsed()) {
      const auto cfg = resolve(run_opts);
      const auto res = acadmm::run_experiment(cfg);
      const auto& s = res.summary;
      std::cout << to_string(cfg.engine.policy.kind) << ": " << s.iterations << " iterations, "
                << to_string(s.reason) << ", objective " << s.objective << ", primal_res_sq " << s.primal_res_sq
                << ", dual_res_sq " << s.dual_res_sq << '\n';
      if (s.inner_warnings > 0) std::cerr << "warning: " << s.inner_warnings << " inexact subproblem solves\n";
      return res.exit_code;
    }
    if (cmp_cmd->parsed()) {
      const auto cfg = resolve(cmp_opts);
      const auto entries = acadmm::compare_policies(cfg);
      const auto data = acadmm::load_dataset(cfg);
      acadmm::print_compare_table(std::cout, dataset_label(cfg), data.samples(), data.dimension(), entries);
      return 0;
    }
    if (gen_cmd->parsed()) {
      const auto cfg = resolve(gen_opts);
      if (!cfg.gen) throw acadmm::InvalidInput("gen needs --gen or a preset with a generator");
      const auto data = acadmm::load_dataset(cfg);
      std::ofstream out(out_path);
      if (!out) throw acadmm::InvalidInput("cannot write '" + out_path + "'");
      acadmm::write_libsvm(out, data);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
