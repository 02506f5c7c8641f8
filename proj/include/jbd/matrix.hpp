#pragma once

#include <span>
#include <tuple>
#include <vector>

namespace jbd {

/// Compressed sparse row matrix with 0-based indices.
///
/// Invariants: row_offsets has nrows + 1 entries, is nondecreasing, starts at 0
/// and ends at nnz(); column indices are in range and strictly ascending inside
/// each row (so there are no duplicate entries). Explicitly stored zeros are kept.
struct CsrMatrix {
  int nrows = 0;
  int ncols = 0;
  std::vector<int> row_offsets{0};
  std::vector<int> col_indices;
  std::vector<double> values;

  int nnz() const { return static_cast<int>(values.size()); }

  /// Throws InvalidInputError if any structural invariant is broken.
  void validate() const;

  /// Builds a CSR matrix from (row, col, value) triplets in any order.
  /// Duplicate coordinates are summed into a single stored entry.
  static CsrMatrix from_triplets(int nrows, int ncols,
                                 std::vector<std::tuple<int, int, double>> triplets);
};

/// Dense column-major matrix.
struct DenseMatrix {
  int nrows = 0;
  int ncols = 0;
  std::vector<double> values;  // column-major, nrows * ncols entries

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : nrows(r), ncols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return values[static_cast<std::size_t>(j) * nrows + i]; }
  double operator()(int i, int j) const {
    return values[static_cast<std::size_t>(j) * nrows + i];
  }

  double* col(int j) { return values.data() + static_cast<std::size_t>(j) * nrows; }
  const double* col(int j) const { return values.data() + static_cast<std::size_t>(j) * nrows; }
  std::span<double> col_span(int j) { return {col(j), static_cast<std::size_t>(nrows)}; }
  std::span<const double> col_span(int j) const {
    return {col(j), static_cast<std::size_t>(nrows)};
  }

  void append_col(std::span<const double> column);
  void reserve_cols(int cols) { values.reserve(static_cast<std::size_t>(nrows) * cols); }

  /// Copy of the leading nrows x k block (the first k columns).
  DenseMatrix leading_cols(int k) const;

  static DenseMatrix identity(int n);
};

DenseMatrix to_dense(const CsrMatrix& a);
CsrMatrix to_csr(const DenseMatrix& a);

/// y = A * x and y = A^T * x with deterministic accumulation order.
std::vector<double> csr_matvec(const CsrMatrix& a, std::span<const double> x);
std::vector<double> csr_matvec_transpose(const CsrMatrix& a, std::span<const double> x);

/// Allocation-free variants writing into a caller-provided y (overwritten).
void csr_matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
void csr_matvec_transpose(const CsrMatrix& a, std::span<const double> x,
                          std::span<double> y);
void dense_matvec(const DenseMatrix& a, std::span<const double> x, std::span<double> y);
void dense_matvec_transpose(const DenseMatrix& a, std::span<const double> x,
                            std::span<double> y);

/// Dense products; sizes are checked and ShapeError is thrown on mismatch.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);  // A^T * B
std::vector<double> dense_matvec(const DenseMatrix& a, std::span<const double> x);
std::vector<double> dense_matvec_transpose(const DenseMatrix& a, std::span<const double> x);

}  // namespace jbd
