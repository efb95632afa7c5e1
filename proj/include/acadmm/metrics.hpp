#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "acadmm/engine.hpp"

namespace acadmm {

struct MetricsRow {
  long iter = 0;
  double primal_res_sq = 0.0;
  double dual_res_sq = 0.0;
  double tau_min = 0.0;
  double tau_mean = 0.0;
  double tau_max = 0.0;
  double objective = 0.0;
  double h_progress = 0.0;
  double wall_ms = 0.0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline constexpr std::string_view kMetricsHeader =
    "iter,primal_res_sq,dual_res_sq,tau_min,tau_mean,tau_max,objective,h_progress,wall_ms";

MetricsRow to_metrics_row(const IterationRecord& rec);

// Fields use shortest round-trip formatting; parse(emit(x)) == x.
std::string emit_csv_row(const MetricsRow& row);
MetricsRow parse_csv_row(std::string_view line);
std::string emit_json_row(const MetricsRow& row);
MetricsRow parse_json_row(std::string_view line);

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
void write_metrics_jsonl(std::ostream& out, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(std::istream& in);
std::vector<MetricsRow> read_metrics_jsonl(std::istream& in);

}  // namespace acadmm
