#include "acadmm/kernels.hpp"

#include <algorithm>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace acadmm::kernels {

namespace {

void check_cols(const SparseMatrix& a, const DenseVector& x) {
  if (static_cast<std::size_t>(x.size()) != a.cols()) throw InvalidInput("csr kernel: dimension mismatch");
}
void check_rows(const SparseMatrix& a, const DenseVector& x) {
  if (static_cast<std::size_t>(x.size()) != a.rows()) throw InvalidInput("csr kernel: dimension mismatch");
}

// Column-major copy; entries of each column stay in increasing row order.
struct Csc {
  std::vector<std::size_t> col_ptr;
  std::vector<std::size_t> row_idx;
  std::vector<double> values;
};

Csc transpose(const SparseMatrix& a) {
  Csc t;
  t.col_ptr.assign(a.cols() + 1, 0);
  for (std::size_t c : a.col_idx()) ++t.col_ptr[c + 1];
  for (std::size_t c = 0; c < a.cols(); ++c) t.col_ptr[c + 1] += t.col_ptr[c];
  t.row_idx.resize(a.nnz());
  t.values.resize(a.nnz());
  std::vector<std::size_t> next(t.col_ptr.begin(), t.col_ptr.end() - 1);
  const auto& rp = a.row_ptr();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) {
      const std::size_t dst = next[a.col_idx()[p]]++;
      t.row_idx[dst] = r;
      t.values[dst] = a.values()[p];
    }
  }
  return t;
}

}  // namespace

namespace serial {

void csr_matvec(const SparseMatrix& a, const DenseVector& x, DenseVector& y) {
  check_cols(a, x);
  y.resize(static_cast<Eigen::Index>(a.rows()));
  for (std::size_t r = 0; r < a.rows(); ++r) y[static_cast<Eigen::Index>(r)] = a.row_dot(r, x);
}

void csr_matvec_transpose(const SparseMatrix& a, const DenseVector& x, DenseVector& y) {
  check_rows(a, x);
  y = DenseVector::Zero(static_cast<Eigen::Index>(a.cols()));
  for (std::size_t r = 0; r < a.rows(); ++r) a.axpy_row(r, x[static_cast<Eigen::Index>(r)], y);
}

void csr_gram(const SparseMatrix& a, DenseMatrix& g) {
  const auto n = static_cast<Eigen::Index>(a.cols());
  g = DenseMatrix::Zero(n, n);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto cols = a.row_cols(r);
    const auto vals = a.row_values(r);
    for (std::size_t p = 0; p < cols.size(); ++p)
      for (std::size_t q = 0; q < cols.size(); ++q)
        g(static_cast<Eigen::Index>(cols[p]), static_cast<Eigen::Index>(cols[q])) += vals[p] * vals[q];
  }
}

void csr_outer_gram(const SparseMatrix& a, DenseMatrix& g) {
  const auto n = static_cast<Eigen::Index>(a.rows());
  g = DenseMatrix::Zero(n, n);
  DenseVector row(static_cast<Eigen::Index>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    row.setZero();
    a.axpy_row(i, 1.0, row);
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = a.row_dot(j, row);
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
      g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = s;
    }
  }
}

}  // namespace serial

namespace parallel {

void csr_matvec(const SparseMatrix& a, const DenseVector& x, DenseVector& y) {
  check_cols(a, x);
  y.resize(static_cast<Eigen::Index>(a.rows()));
  const auto rows = static_cast<long>(a.rows());
#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) y[r] = a.row_dot(static_cast<std::size_t>(r), x);
}

void csr_matvec_transpose(const SparseMatrix& a, const DenseVector& x, DenseVector& y) {
  check_rows(a, x);
  y = DenseVector::Zero(static_cast<Eigen::Index>(a.cols()));
  // Each thread owns a column range and walks all rows in order.
#pragma omp parallel
  {
    std::size_t lo = 0, hi = a.cols();
#ifdef _OPENMP
    const auto nt = static_cast<std::size_t>(omp_get_num_threads());
    const auto id = static_cast<std::size_t>(omp_get_thread_num());
    lo = a.cols() * id / nt;
    hi = a.cols() * (id + 1) / nt;
#endif
    if (lo < hi) {
      for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto cols = a.row_cols(r);
        const auto vals = a.row_values(r);
        const double xr = x[static_cast<Eigen::Index>(r)];
        for (auto p = static_cast<std::size_t>(std::lower_bound(cols.begin(), cols.end(), lo) - cols.begin());
             p < cols.size() && cols[p] < hi; ++p)
          y[static_cast<Eigen::Index>(cols[p])] += xr * vals[p];
      }
    }
  }
}

void csr_gram(const SparseMatrix& a, DenseMatrix& g) {
  const Csc t = transpose(a);
  const auto n = static_cast<long>(a.cols());
  g = DenseMatrix::Zero(n, n);
  // Column i of G gathers the rows touching column i, in row order.
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) {
    for (std::size_t p = t.col_ptr[i]; p < t.col_ptr[i + 1]; ++p) {
      const std::size_t r = t.row_idx[p];
      const auto cols = a.row_cols(r);
      const auto vals = a.row_values(r);
      for (std::size_t q = 0; q < cols.size(); ++q) g(static_cast<Eigen::Index>(cols[q]), i) += vals[q] * t.values[p];
    }
  }
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace acadmm::kernels
