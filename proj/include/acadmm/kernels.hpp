#pragma once

// CSR kernels. `serial` is the reference; `parallel` splits independent rows
// (or output columns) across OpenMP threads and must agree bit-for-bit with
// the reference, since every output entry is accumulated in the same order.

#include "acadmm/sparse.hpp"
#include "acadmm/types.hpp"

namespace acadmm::kernels {

namespace serial {

// y = A x
void csr_matvec(const SparseMatrix& a, const DenseVector& x, DenseVector& y);
// y = A^T x
void csr_matvec_transpose(const SparseMatrix& a, const DenseVector& x, DenseVector& y);
// G = A^T A (dense, cols x cols)
void csr_gram(const SparseMatrix& a, DenseMatrix& g);
// G = A A^T (dense, rows x rows)
void csr_outer_gram(const SparseMatrix& a, DenseMatrix& g);

}  // namespace serial

namespace parallel {

void csr_matvec(const SparseMatrix& a, const DenseVector& x, DenseVector& y);
// Column-partitioned through a transposed copy built on the fly.
void csr_matvec_transpose(const SparseMatrix& a, const DenseVector& x, DenseVector& y);
void csr_gram(const SparseMatrix& a, DenseMatrix& g);

}  // namespace parallel

// Number of threads OpenMP would use for a parallel region (1 without OpenMP).
int max_threads();

}  // namespace acadmm::kernels
