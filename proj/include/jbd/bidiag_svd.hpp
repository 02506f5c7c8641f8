// SVD of the small bidiagonal matrices produced by the process, and the
// inverse-norm queries built on top of it.
//
// The driver is an implicit-QR iteration on an upper bidiagonal matrix in
// the Demmel-Kahan style: a zero-shift sweep (high relative accuracy, used
// when the shift would be negligible anyway) and a shifted Golub-Kahan
// sweep for fast convergence on clustered values. The lower bidiagonal B is
// first reduced to upper form by a sequence of row Givens rotations.
#pragma once

#include <cstdint>
#include <vector>

#include "jbd/jbd.hpp"
#include "jbd/matrix.hpp"

namespace jbd {

enum class BidiagSide : std::uint8_t { b, bhat };

struct RitzDecomposition {
  BidiagSide side = BidiagSide::b;
  std::vector<double> thetas;  // descending, nonnegative
  DenseMatrix left;            // (k+1) x k for side b, k x k for side bhat
  DenseMatrix right;           // k x k
};

// Full SVD of the designated k-column bidiagonal matrix:
//   side b:    the (k+1) x k lower bidiagonal (diag alpha, subdiag beta_2..)
//   side bhat: the k x k upper bidiagonal (diag alpha_hat, superdiag beta_hat)
// Throws ShapeError when the coefficient arrays are shorter than k needs.
RitzDecomposition svd_bidiagonal(const BidiagPair& coeffs, BidiagSide side,
                                 int k);

// Values-only path (no vector accumulation), descending.
std::vector<double> bidiagonal_singular_values(const BidiagPair& coeffs,
                                               BidiagSide side, int k);

// 1 / theta_min of the designated SQUARE bidiagonal:
//   side bhat: Bhat_k itself;
//   side b:    the k x k upper bidiagonal with diag alpha_1..alpha_k and
//              superdiag beta_2..beta_k (the square part of B_k^T).
// Throws SingularMatrixError when theta_min is exactly zero.
double inv_norm(const BidiagPair& coeffs, BidiagSide side, int k);

}  // namespace jbd
