#include "acadmm/io/libsvm.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

namespace acadmm {
namespace {

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
    if (!s.empty() && s.front() == '-') return false;
  }
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && end == s.data() + s.size();
}

bool parse_index(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && end == s.data() + s.size();
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

void append_double(std::string& s, double x) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw InternalError("to_chars failed");
  s.append(buf, end);
}

}  // namespace

LibsvmFile parse_libsvm(std::istream& in, std::optional<std::size_t> dimension) {
  LibsvmFile file;
  std::string raw;
  std::size_t lineno = 0;
  std::size_t max_index = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    LibsvmRecord rec;
    if (!parse_double(tokens[0], rec.label)) throw ParseError(lineno, "bad label '" + std::string(tokens[0]) + "'");
    if (!std::isfinite(rec.label)) throw ParseError(lineno, "label is not finite");
    std::size_t prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const std::string_view tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError(lineno, "expected index:value, got '" + std::string(tok) + "'");
      std::size_t idx = 0;
      double val = 0.0;
      if (!parse_index(tok.substr(0, colon), idx)) throw ParseError(lineno, "bad index in '" + std::string(tok) + "'");
      if (idx == 0) throw ParseError(lineno, "indices are 1-based");
      if (!parse_double(tok.substr(colon + 1), val)) throw ParseError(lineno, "bad value in '" + std::string(tok) + "'");
      if (!std::isfinite(val)) throw ParseError(lineno, "value is not finite");
      if (idx <= prev) throw ParseError(lineno, "index " + std::to_string(idx) + " does not increase");
      if (dimension && idx > *dimension)
        throw ParseError(lineno, "index " + std::to_string(idx) + " exceeds dimension " + std::to_string(*dimension));
      prev = idx;
      rec.features.emplace_back(idx, val);
    }
    if (prev > max_index) max_index = prev;
    file.records.push_back(std::move(rec));
  }
  if (in.bad()) throw InvalidInput("read error");
  file.dimension = dimension.value_or(max_index);
  return file;
}

LibsvmFile read_libsvm(const std::filesystem::path& path, std::optional<std::size_t> dimension) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  return parse_libsvm(in, dimension);
}

Dataset to_dataset(const LibsvmFile& file) {
  Dataset d;
  d.features = SparseMatrix(file.dimension);
  d.targets.reserve(file.records.size());
  std::vector<SparseMatrix::Entry> row;
  for (const auto& rec : file.records) {
    row.clear();
    for (const auto& [idx, val] : rec.features) row.push_back({idx - 1, val});
    d.features.append_row(row);
    d.targets.push_back(rec.label);
  }
  return d;
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  std::string line;
  for (std::size_t r = 0; r < data.samples(); ++r) {
    line.clear();
    append_double(line, data.targets.at(r));
    const auto cols = data.features.row_cols(r);
    const auto vals = data.features.row_values(r);
    for (std::size_t p = 0; p < cols.size(); ++p) {
      line += ' ';
      line += std::to_string(cols[p] + 1);
      line += ':';
      append_double(line, vals[p]);
    }
    line += '\n';
    out << line;
  }
}

}  // namespace acadmm
