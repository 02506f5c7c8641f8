// Orthogonal projection onto the column space of the stacked pair [A; L].
//
// Two interchangeable backends:
//   * explicit-qr: densify [A; L], factor once, apply Q (Q^T x) directly.
//     Also exposes Q, Q_A (top m rows), Q_L (bottom p rows) and R for
//     consumers that need the factors themselves.
//   * lsqr: matrix-free. project(x) = [A; L] * argmin_w ||[A; L] w - x||,
//     solved per call by LSQR. Factor accessors are unavailable here.
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "jbd/matrix.hpp"

namespace jbd {

struct SparsePair {
  CsrMatrix a;  // m x n
  CsrMatrix l;  // p x n

  int m() const { return a.nrows; }
  int p() const { return l.nrows; }
  int n() const { return a.ncols; }

  // Throws ShapeError unless a.ncols == l.ncols and m + p >= n.
  void validate() const;
};

// y = [A; L] * x, with y laid out as (top m entries from A, bottom p from L).
void stacked_matvec(const SparsePair& pair, std::span<const double> x,
                    std::span<double> y);

// y = [A; L]^T * x = A^T x(1:m) + L^T x(m+1:m+p).
void stacked_matvec_transpose(const SparsePair& pair, std::span<const double> x,
                              std::span<double> y);

struct LsqrOptions {
  double atol = 1e-14;  // relative stopping tolerance, must be in (0, 1e-8]
  int max_iters = 0;    // 0 means 4 * n
};

struct LsqrResult {
  std::vector<double> x;
  int iterations = 0;
  double residual_norm = 0.0;         // ||[A;L] x - b||
  double normal_residual_norm = 0.0;  // ||[A;L]^T ([A;L] x - b)||
};

// Minimizes ||[A; L] w - b|| by the Paige-Saunders bidiagonalization
// iteration. Stops once ||[A;L]^T r|| <= atol * ||[A;L]||_F,est * ||r||.
// Throws ConvergenceError (carrying the best iterate) on iteration overrun.
LsqrResult lsqr_solve(const SparsePair& pair, std::span<const double> b,
                      const LsqrOptions& opts = {});

enum class ProjectorMode : std::uint8_t { explicit_qr, lsqr };

class ProjectionProvider {
 public:
  virtual ~ProjectionProvider() = default;

  virtual ProjectorMode mode() const = 0;
  // Dimensions of the underlying pair.
  virtual int m() const = 0;
  virtual int p() const = 0;
  virtual int n() const = 0;

  // y = Q Q^T x where Q spans range([A; L]); x and y have length m + p.
  virtual void project(std::span<const double> x,
                       std::span<double> y) const = 0;

  // argmin_x ||[A; L] x - rhs||. The explicit-qr backend back-substitutes
  // through R; the lsqr backend iterates. rhs has length m + p.
  virtual std::vector<double> lstsq(std::span<const double> rhs) const = 0;

  // Factor access. Only the explicit-qr backend implements these; the
  // lsqr backend throws UnsupportedModeError.
  virtual const DenseMatrix& q() const = 0;
  virtual DenseMatrix q_a() const = 0;  // rows 1..m of Q
  virtual DenseMatrix q_l() const = 0;  // rows m+1..m+p of Q
  virtual const DenseMatrix& r() const = 0;
};

// Densifies [A; L], runs Householder QR once, serves projections from the
// stored factor. Throws RankDeficientError if [A; L] loses column rank.
std::unique_ptr<ProjectionProvider> make_explicit_qr_provider(
    const SparsePair& pair);

// Matrix-free backend; every project() call runs LSQR from scratch.
std::unique_ptr<ProjectionProvider> make_lsqr_provider(
    const SparsePair& pair, const LsqrOptions& opts = {});

}  // namespace jbd
