#include "acadmm/sparse.hpp"

#include <cmath>
#include <string>

namespace acadmm {

void SparseMatrix::append_row(std::span<const Entry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.col >= cols_)
      throw InvalidInput("sparse row: column " + std::to_string(e.col) + " out of range (cols=" +
                         std::to_string(cols_) + ")");
    if (i > 0 && e.col <= entries[i - 1].col)
      throw InvalidInput("sparse row: column indices must be strictly increasing");
    if (!std::isfinite(e.value)) throw InvalidInput("sparse row: non-finite value");
  }
  for (const auto& e : entries) {
    col_idx_.push_back(e.col);
    values_.push_back(e.value);
  }
  row_ptr_.push_back(col_idx_.size());
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  SparseMatrix m(static_cast<std::size_t>(dense.cols()));
  std::vector<Entry> row;
  for (Eigen::Index r = 0; r < dense.rows(); ++r) {
    row.clear();
    for (Eigen::Index c = 0; c < dense.cols(); ++c)
      if (dense(r, c) != 0.0) row.push_back({static_cast<std::size_t>(c), dense(r, c)});
    m.append_row(row);
  }
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n);
  for (std::size_t r = 0; r < n; ++r) {
    const Entry e{r, 1.0};
    m.append_row({&e, 1});
  }
  return m;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_idx_[p])) = values_[p];
  return d;
}

}  // namespace acadmm
