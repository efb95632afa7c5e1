#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "acadmm/dataset.hpp"

namespace acadmm {

struct LibsvmRecord {
  double label = 0.0;
  std::vector<std::pair<std::size_t, double>> features;  // 1-based index, value

  friend bool operator==(const LibsvmRecord&, const LibsvmRecord&) = default;
};

class ParseError : public InvalidInput {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InvalidInput("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct LibsvmFile {
  std::vector<LibsvmRecord> records;
  std::size_t dimension = 0;  // max index, or the override
};

// One "label index:value ..." record per line. Blank lines are skipped and
// '#' starts a comment. Indices are 1-based and strictly increasing. With
// `dimension` set, an index past it is an error.
LibsvmFile parse_libsvm(std::istream& in, std::optional<std::size_t> dimension = std::nullopt);
LibsvmFile read_libsvm(const std::filesystem::path& path, std::optional<std::size_t> dimension = std::nullopt);

Dataset to_dataset(const LibsvmFile& file);

// Shortest round-trip formatting, so write then parse is lossless.
void write_libsvm(std::ostream& out, const Dataset& data);

}  // namespace acadmm
