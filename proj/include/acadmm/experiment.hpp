#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acadmm/datagen.hpp"
#include "acadmm/metrics.hpp"
#include "acadmm/runtime.hpp"

namespace acadmm {

// "synthetic1:512x10" or "synthetic2:800x10"
struct GeneratorSpec {
  int family = 1;
  std::size_t samples = 512;
  std::size_t features = 10;
};
GeneratorSpec parse_generator_spec(std::string_view s);
std::string to_string(const GeneratorSpec& g);

// engine: the serial reference loop; sequential / parallel: the
// coordinator/worker runtime with one or many threads.
enum class RunnerMode { engine, sequential, parallel };
RunnerMode parse_runner_mode(std::string_view s);
std::string_view to_string(RunnerMode m);

struct ExperimentConfig {
  LossKind problem = LossKind::squared;
  std::optional<std::filesystem::path> data;
  std::optional<std::size_t> data_dimension;
  std::optional<GeneratorSpec> gen;
  std::size_t workers = 1;
  PartitionMode partition = PartitionMode::contiguous;
  EngineConfig engine;
  double rho1 = 10.0;
  double rho2 = 10.0;
  double svm_c = 1.0;
  std::optional<std::filesystem::path> metrics;  // CSV; a .jsonl mirror is written next to it
  std::optional<std::filesystem::path> summary;
  RunnerMode mode = RunnerMode::parallel;
  int threads = 0;
  bool deterministic_reduction = true;

  void validate() const;
};

// Applies one key=value setting; keys are the long flag names without "--".
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
// Flat "key = value" lines, '#' comments.
void apply_config_text(ExperimentConfig& cfg, std::istream& in);
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

// Desk-scale versions of the synthetic benchmark rows.
const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& presets();
void apply_preset(ExperimentConfig& cfg, std::string_view name);

Dataset load_dataset(const ExperimentConfig& cfg);
ConsensusProblem build_problem(const ExperimentConfig& cfg, const Dataset& data);
Regularizer regularizer_for(const ExperimentConfig& cfg);

struct ExperimentSummary {
  long iterations = 0;
  StopReason reason = StopReason::max_iterations;
  double primal_res_sq = 0.0;
  double dual_res_sq = 0.0;
  double objective = 0.0;
  double h_progress = 0.0;
  double total_wall_ms = 0.0;
  int inner_warnings = 0;
};

struct ExperimentResult {
  RunResult run;
  std::vector<MetricsRow> rows;
  ExperimentSummary summary;
  int exit_code = 0;  // 0 converged, 2 hit maxiter
};

RunResult execute(const ConsensusProblem& problem, const ExperimentConfig& cfg);
// Runs, then writes metrics and summary if paths are set.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string summary_json(const ExperimentConfig& cfg, const ExperimentSummary& s);
std::filesystem::path jsonl_path(const std::filesystem::path& csv);

struct CompareEntry {
  PolicyKind policy;
  long iterations;
  bool converged;
  double seconds;
};
// fixed, rb, aadmm, crb, acadmm on one dataset.
std::vector<CompareEntry> compare_policies(const ExperimentConfig& cfg);
// "57(0.12)", or "1000+(1.3)" when the run did not converge.
std::string format_cell(const CompareEntry& e);
void print_compare_table(std::ostream& out, std::string_view dataset, std::size_t samples, std::size_t features,
                         const std::vector<CompareEntry>& entries);

}  // namespace acadmm
