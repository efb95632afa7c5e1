#include "acadmm/dataset.hpp"

#include <string>

namespace acadmm {

std::string_view to_string(PartitionMode m) {
  return m == PartitionMode::round_robin ? "round-robin" : "contiguous";
}

PartitionMode parse_partition_mode(std::string_view s) {
  if (s == "round-robin" || s == "round_robin") return PartitionMode::round_robin;
  if (s == "contiguous" || s == "contiguous-blocks") return PartitionMode::contiguous;
  throw InvalidInput("unknown partition mode '" + std::string(s) + "'");
}

std::vector<std::vector<std::size_t>> partition_rows(std::size_t samples, std::size_t nodes, PartitionMode mode) {
  if (nodes < 1) throw InvalidInput("partition: need at least one node");
  std::vector<std::vector<std::size_t>> out(nodes);
  if (mode == PartitionMode::round_robin) {
    for (std::size_t r = 0; r < samples; ++r) out[r % nodes].push_back(r);
  } else {
    for (std::size_t i = 0; i < nodes; ++i)
      for (std::size_t r = i * samples / nodes; r < (i + 1) * samples / nodes; ++r) out[i].push_back(r);
  }
  return out;
}

std::vector<WorkerShard> partition(const Dataset& data, std::size_t nodes, PartitionMode mode) {
  if (data.targets.size() != data.samples()) throw InvalidInput("dataset: one target per row required");
  const auto rows = partition_rows(data.samples(), nodes, mode);
  std::vector<WorkerShard> shards(nodes);
  std::vector<SparseMatrix::Entry> entries;
  for (std::size_t i = 0; i < nodes; ++i) {
    shards[i].data = SparseMatrix(data.dimension());
    shards[i].targets.reserve(rows[i].size());
    for (std::size_t r : rows[i]) {
      const auto cols = data.features.row_cols(r);
      const auto vals = data.features.row_values(r);
      entries.clear();
      for (std::size_t p = 0; p < cols.size(); ++p) entries.push_back({cols[p], vals[p]});
      shards[i].data.append_row(entries);
      shards[i].targets.push_back(data.targets[r]);
    }
  }
  return shards;
}

}  // namespace acadmm
