#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "acadmm/types.hpp"

namespace acadmm {

// Row-major compressed sparse rows. Column indices are strictly increasing
// within a row and smaller than cols(); values are finite.
class SparseMatrix {
 public:
  struct Entry {
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t cols) : cols_(cols), row_ptr_{0} {}

  // Appends one row. Throws InvalidInput if the row breaks the invariants.
  void append_row(std::span<const Entry> entries);

  static SparseMatrix from_dense(const DenseMatrix& dense);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_cols(std::size_t r) const {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  double row_dot(std::size_t r, const DenseVector& x) const {
    double s = 0.0;
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s += values_[p] * x[col_idx_[p]];
    return s;
  }
  double row_norm_sq(std::size_t r) const {
    double s = 0.0;
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s += values_[p] * values_[p];
    return s;
  }
  // y += a * row(r)
  void axpy_row(std::size_t r, double a, DenseVector& y) const {
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) y[col_idx_[p]] += a * values_[p];
  }

  DenseMatrix to_dense() const;

  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace acadmm
