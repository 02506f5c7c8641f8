#pragma once

#include <span>
#include <utility>
#include <vector>

#include "jbd/matrix.hpp"

namespace jbd {

/// Compact QR factors: q has the shape of the input, r is square upper
/// triangular with a nonnegative diagonal and exact zeros below it.
struct QrFactors {
  DenseMatrix q;
  DenseMatrix r;
};

/// Householder QR of a tall matrix (nrows >= ncols). Throws RankDeficientError
/// when some |r_ii| fails the full-rank test against nrows * eps * ||column i||.
QrFactors householder_qr(const DenseMatrix& a);

/// One pass of modified Gram-Schmidt: subtracts the projections of vec onto the
/// selected basis columns, in ascending index order. Returns the updated vector
/// and the projection coefficients aligned with `indices`.
std::pair<std::vector<double>, std::vector<double>> mgs_orthogonalize(
    std::span<const double> vec, const DenseMatrix& basis, std::span<const int> indices);

struct ReorthResult {
  std::vector<double> vec;
  std::vector<double> coefficients;  // combined over passes, aligned with indices
  int passes = 0;
};

/// One MGS pass, then a second one only if some leftover inner product against
/// a selected column still exceeds 10 * eps * ||vec_in||.
ReorthResult reorthogonalize(std::span<const double> vec, const DenseMatrix& basis,
                             std::span<const int> indices);

struct SvdResult {
  std::vector<double> sigma;  // descending, nonnegative
  DenseMatrix u;              // nrows x min(nrows, ncols)
  DenseMatrix v;              // ncols x min(nrows, ncols)
};

/// Dense SVD by one-sided Jacobi rotations. Simple and accurate; intended as a
/// reference oracle, not a fast path.
SvdResult dense_svd_oracle(const DenseMatrix& a);

/// W^T * W.
DenseMatrix gram(const DenseMatrix& w);

/// Reduces a symmetric matrix to tridiagonal form (diagonal d, off-diagonal e)
/// by Householder similarity transforms. Only the eigenvalue data is kept.
void sym_tridiagonalize(DenseMatrix a, std::vector<double>& d, std::vector<double>& e);

/// Extreme eigenvalues of a symmetric tridiagonal matrix via Sturm bisection.
double tridiag_eig_largest(std::span<const double> d, std::span<const double> e);
double tridiag_eig_smallest(std::span<const double> d, std::span<const double> e);

/// max |eigenvalue| of a symmetric matrix (exact, via tridiagonalization).
double sym_spectral_norm(const DenseMatrix& s);

/// Largest singular value of a dense matrix, computed from the Gram matrix of
/// the smaller side.
double spectral_norm(const DenseMatrix& a);

/// Solves r x = rhs for upper triangular r. Throws SingularMatrixError on a
/// zero pivot.
std::vector<double> back_substitute(const DenseMatrix& r, std::span<const double> rhs);

}  // namespace jbd
