#include "acadmm/metrics.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace acadmm {
namespace {

void put(std::string& s, double x) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw InternalError("to_chars failed");
  s.append(buf, end);
}

template <typename T>
T get(std::string_view field) {
  T x{};
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
  if (ec != std::errc() || end != field.data() + field.size())
    throw InvalidInput("metrics: bad field '" + std::string(field) + "'");
  return x;
}

std::array<double*, 8> fields(MetricsRow& r) {
  return {&r.primal_res_sq, &r.dual_res_sq, &r.tau_min, &r.tau_mean, &r.tau_max, &r.objective, &r.h_progress,
          &r.wall_ms};
}

constexpr std::array<const char*, 8> kNames = {"primal_res_sq", "dual_res_sq", "tau_min",    "tau_mean",
                                               "tau_max",       "objective",   "h_progress", "wall_ms"};

}  // namespace

MetricsRow to_metrics_row(const IterationRecord& rec) {
  return {rec.k,       rec.residuals.primal_sq, rec.residuals.dual_sq, rec.tau.min, rec.tau.mean,
          rec.tau.max, rec.objective,           rec.h_progress,        rec.wall_ms};
}

std::string emit_csv_row(const MetricsRow& row) {
  std::string s = std::to_string(row.iter);
  MetricsRow copy = row;
  for (double* f : fields(copy)) {
    s += ',';
    put(s, *f);
  }
  return s;
}

MetricsRow parse_csv_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  MetricsRow row;
  const auto next = [&line]() {
    const auto comma = line.find(',');
    const std::string_view f = line.substr(0, comma);
    line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
    return f;
  };
  row.iter = get<long>(next());
  for (double* f : fields(row)) {
    if (line.empty()) throw InvalidInput("metrics: too few fields");
    *f = get<double>(next());
  }
  if (!line.empty()) throw InvalidInput("metrics: too many fields");
  return row;
}

std::string emit_json_row(const MetricsRow& row) {
  nlohmann::ordered_json j;
  j["iter"] = row.iter;
  MetricsRow copy = row;
  const auto fs = fields(copy);
  for (std::size_t i = 0; i < fs.size(); ++i) j[kNames[i]] = *fs[i];
  return j.dump();
}

MetricsRow parse_json_row(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  MetricsRow row;
  row.iter = j.at("iter").get<long>();
  const auto fs = fields(row);
  for (std::size_t i = 0; i < fs.size(); ++i) *fs[i] = j.at(kNames[i]).get<double>();
  return row;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) out << emit_csv_row(r) << '\n';
}

void write_metrics_jsonl(std::ostream& out, const std::vector<MetricsRow>& rows) {
  for (const auto& r : rows) out << emit_json_row(r) << '\n';
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("metrics: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsHeader) throw InvalidInput("metrics: unexpected header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(parse_csv_row(line));
  return rows;
}

std::vector<MetricsRow> read_metrics_jsonl(std::istream& in) {
  std::vector<MetricsRow> rows;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(parse_json_row(line));
  return rows;
}

}  // namespace acadmm
