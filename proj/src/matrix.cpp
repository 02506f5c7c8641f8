#include "jbd/matrix.hpp"

#include <algorithm>
#include <string>

#include "jbd/errors.hpp"

namespace jbd {

void CsrMatrix::validate() const {
  if (nrows < 0 || ncols < 0) throw InvalidInputError("csr: negative dimension");
  if (row_offsets.size() != static_cast<std::size_t>(nrows) + 1)
    throw InvalidInputError("csr: row_offsets must have nrows + 1 entries");
  if (row_offsets.front() != 0) throw InvalidInputError("csr: row_offsets must start at 0");
  if (row_offsets.back() != nnz())
    throw InvalidInputError("csr: row_offsets must end at the entry count");
  if (col_indices.size() != values.size())
    throw InvalidInputError("csr: col_indices and values length mismatch");
  for (int i = 0; i < nrows; ++i) {
    if (row_offsets[i] > row_offsets[i + 1])
      throw InvalidInputError("csr: row_offsets must be nondecreasing");
    for (int t = row_offsets[i]; t < row_offsets[i + 1]; ++t) {
      const int c = col_indices[t];
      if (c < 0 || c >= ncols)
        throw InvalidInputError("csr: column index out of range in row " + std::to_string(i));
      if (t > row_offsets[i] && col_indices[t - 1] >= c)
        throw InvalidInputError("csr: column indices must be strictly ascending in row " +
                                std::to_string(i));
    }
  }
}

CsrMatrix CsrMatrix::from_triplets(int nrows, int ncols,
                                   std::vector<std::tuple<int, int, double>> triplets) {
  for (const auto& [r, c, v] : triplets) {
    (void)v;
    if (r < 0 || r >= nrows || c < 0 || c >= ncols)
      throw InvalidInputError("triplet coordinate out of range: (" + std::to_string(r) + ", " +
                              std::to_string(c) + ")");
  }
  std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
    return std::make_pair(std::get<0>(a), std::get<1>(a)) <
           std::make_pair(std::get<0>(b), std::get<1>(b));
  });

  CsrMatrix out;
  out.nrows = nrows;
  out.ncols = ncols;
  out.row_offsets.assign(static_cast<std::size_t>(nrows) + 1, 0);
  out.col_indices.reserve(triplets.size());
  out.values.reserve(triplets.size());

  std::size_t t = 0;
  for (int i = 0; i < nrows; ++i) {
    out.row_offsets[i] = static_cast<int>(out.values.size());
    while (t < triplets.size() && std::get<0>(triplets[t]) == i) {
      const int c = std::get<1>(triplets[t]);
      double v = std::get<2>(triplets[t]);
      ++t;
      while (t < triplets.size() && std::get<0>(triplets[t]) == i &&
             std::get<1>(triplets[t]) == c) {
        v += std::get<2>(triplets[t]);  // duplicates are summed
        ++t;
      }
      out.col_indices.push_back(c);
      out.values.push_back(v);
    }
  }
  out.row_offsets[nrows] = static_cast<int>(out.values.size());
  out.validate();
  return out;
}

void DenseMatrix::append_col(std::span<const double> column) {
  if (static_cast<int>(column.size()) != nrows)
    throw ShapeError("append_col: column length does not match row count");
  values.insert(values.end(), column.begin(), column.end());
  ++ncols;
}

DenseMatrix DenseMatrix::leading_cols(int k) const {
  if (k < 0 || k > ncols) throw ShapeError("leading_cols: bad column count");
  DenseMatrix out;
  out.nrows = nrows;
  out.ncols = k;
  out.values.assign(values.begin(), values.begin() + static_cast<std::size_t>(k) * nrows);
  return out;
}

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix out(n, n);
  for (int i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMatrix to_dense(const CsrMatrix& a) {
  a.validate();
  DenseMatrix out(a.nrows, a.ncols);
  for (int i = 0; i < a.nrows; ++i)
    for (int t = a.row_offsets[i]; t < a.row_offsets[i + 1]; ++t)
      out(i, a.col_indices[t]) = a.values[t];
  return out;
}

CsrMatrix to_csr(const DenseMatrix& a) {
  CsrMatrix out;
  out.nrows = a.nrows;
  out.ncols = a.ncols;
  out.row_offsets.assign(static_cast<std::size_t>(a.nrows) + 1, 0);
  out.col_indices.reserve(a.values.size());
  out.values.reserve(a.values.size());
  for (int i = 0; i < a.nrows; ++i) {
    out.row_offsets[i] = static_cast<int>(out.values.size());
    for (int j = 0; j < a.ncols; ++j) {
      out.col_indices.push_back(j);
      out.values.push_back(a(i, j));
    }
  }
  out.row_offsets[a.nrows] = static_cast<int>(out.values.size());
  return out;
}

void csr_matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (static_cast<int>(x.size()) != a.ncols) throw ShapeError("csr_matvec: length mismatch");
  if (static_cast<int>(y.size()) != a.nrows)
    throw ShapeError("csr_matvec: output length mismatch");
  for (int i = 0; i < a.nrows; ++i) {
    double acc = 0.0;
    for (int t = a.row_offsets[i]; t < a.row_offsets[i + 1]; ++t)
      acc += a.values[t] * x[a.col_indices[t]];
    y[i] = acc;
  }
}

std::vector<double> csr_matvec(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.nrows, 0.0);
  csr_matvec(a, x, y);
  return y;
}

void csr_matvec_transpose(const CsrMatrix& a, std::span<const double> x,
                          std::span<double> y) {
  if (static_cast<int>(x.size()) != a.nrows)
    throw ShapeError("csr_matvec_transpose: length mismatch");
  if (static_cast<int>(y.size()) != a.ncols)
    throw ShapeError("csr_matvec_transpose: output length mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < a.nrows; ++i) {
    const double xi = x[i];
    for (int t = a.row_offsets[i]; t < a.row_offsets[i + 1]; ++t)
      y[a.col_indices[t]] += a.values[t] * xi;
  }
}

std::vector<double> csr_matvec_transpose(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.ncols, 0.0);
  csr_matvec_transpose(a, x, y);
  return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.ncols != b.nrows) throw ShapeError("matmul: inner dimensions differ");
  DenseMatrix out(a.nrows, b.ncols);
  for (int j = 0; j < b.ncols; ++j) {
    double* outj = out.col(j);
    const double* bj = b.col(j);
    for (int l = 0; l < a.ncols; ++l) {
      const double blj = bj[l];
      const double* al = a.col(l);
      for (int i = 0; i < a.nrows; ++i) outj[i] += al[i] * blj;
    }
  }
  return out;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.nrows != b.nrows) throw ShapeError("matmul_at_b: row counts differ");
  DenseMatrix out(a.ncols, b.ncols);
  for (int j = 0; j < b.ncols; ++j) {
    double* outj = out.col(j);
    const double* bj = b.col(j);
    for (int i = 0; i < a.ncols; ++i) {
      const double* ai = a.col(i);
      double acc = 0.0;
      for (int t = 0; t < a.nrows; ++t) acc += ai[t] * bj[t];
      outj[i] = acc;
    }
  }
  return out;
}

void dense_matvec(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (static_cast<int>(x.size()) != a.ncols) throw ShapeError("dense_matvec: length mismatch");
  if (static_cast<int>(y.size()) != a.nrows)
    throw ShapeError("dense_matvec: output length mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (int j = 0; j < a.ncols; ++j) {
    const double xj = x[j];
    const double* aj = a.col(j);
    for (int i = 0; i < a.nrows; ++i) y[i] += aj[i] * xj;
  }
}

std::vector<double> dense_matvec(const DenseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.nrows, 0.0);
  dense_matvec(a, x, y);
  return y;
}

void dense_matvec_transpose(const DenseMatrix& a, std::span<const double> x,
                            std::span<double> y) {
  if (static_cast<int>(x.size()) != a.nrows)
    throw ShapeError("dense_matvec_transpose: length mismatch");
  if (static_cast<int>(y.size()) != a.ncols)
    throw ShapeError("dense_matvec_transpose: output length mismatch");
  for (int j = 0; j < a.ncols; ++j) {
    const double* aj = a.col(j);
    double acc = 0.0;
    for (int i = 0; i < a.nrows; ++i) acc += aj[i] * x[i];
    y[j] = acc;
  }
}

std::vector<double> dense_matvec_transpose(const DenseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.ncols, 0.0);
  dense_matvec_transpose(a, x, y);
  return y;
}

}  // namespace jbd
