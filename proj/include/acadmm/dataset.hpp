#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "acadmm/problem.hpp"

namespace acadmm {

// Samples as CSR rows plus one target per row. `block_of`, when filled,
// records which generator block (node) produced each row.
struct Dataset {
  SparseMatrix features;
  std::vector<double> targets;
  std::vector<std::size_t> block_of;

  std::size_t samples() const noexcept { return features.rows(); }
  std::size_t dimension() const noexcept { return features.cols(); }
};

enum class PartitionMode { round_robin, contiguous };
std::string_view to_string(PartitionMode m);
PartitionMode parse_partition_mode(std::string_view s);

// Row indices per node. Every row lands on exactly one node; contiguous
// blocks keep input order, node i taking rows [i n / N, (i + 1) n / N).
std::vector<std::vector<std::size_t>> partition_rows(std::size_t samples, std::size_t nodes, PartitionMode mode);

std::vector<WorkerShard> partition(const Dataset& data, std::size_t nodes, PartitionMode mode);

}  // namespace acadmm
