// Finite-precision diagnostics for a joint bidiagonalization run:
// orthogonality levels of the bases, the coefficient identity residual, the
// projection residuals of the two small matrices against Q_A / Q_L, the
// drift of the vt basis out of range(Q), and the inverse-norm growth guard.
//
// The one-shot functions compute a single value from a finished state and
// are the reference implementations. DiagnosticsCollector produces the same
// numbers as a per-step series while a run progresses, reusing work across
// steps so a full series costs far less than recomputing at every step.
#pragma once

#include <utility>
#include <vector>

#include "jbd/csv.hpp"
#include "jbd/jbd.hpp"
#include "jbd/matrix.hpp"
#include "jbd/projector.hpp"

namespace jbd {

// (kappa, xi): largest off-diagonal Gram magnitude, and the spectral norm
// of I - Gram. Columns are assumed unit-norm.
std::pair<double, double> ortho_levels(const DenseMatrix& basis);

// Spectral norm of the symmetric tridiagonal residual formed from the
// coefficient identities: diagonal 1 - alpha_i^2 - beta_{i+1}^2
// - alphahat_i^2 - betahat_{i-1}^2, off-diagonal
// -(alpha_{i+1} beta_{i+1} - alphahat_i betahat_i). Entries farther from
// the diagonal vanish identically.
double hk_residual(const BidiagPair& coeffs, int k);

// || M_k^T Q_A N_k - B_k(1:k,1:k) || where M_k, N_k are the Q factors of
// the compact QR (nonnegative diagonal) of U_k and V_k = Q^T Vt_k.
// Requires the explicit-qr provider; throws UnsupportedModeError otherwise.
double ek_residual(const JbdState& state, const ProjectionProvider& provider);

// Counterpart for the hat side: || Mhat^T Q_L Nhat - Bhat_k || with
// Uhat_k and the sign-alternated Vhat_k.
double ehat_residual(const JbdState& state, const ProjectionProvider& provider);

// || Vt_k - Q (Q^T Vt_k) ||: how far the vt basis drifted out of range(Q).
double vdev_norm(const JbdState& state, const ProjectionProvider& provider);

// Growth guard on the hat-side inverse norm:
// inv_norm(Bhat_k)^3 <= c4 / ((2k+1) sqrt(eps)).
bool guard_48(const BidiagPair& coeffs, int k, double c4);

struct DiagnosticsRow {
  int k = 0;
  double kappa_u = 0.0, xi_u = 0.0;
  double kappa_vt = 0.0, xi_vt = 0.0;
  double kappa_uh = 0.0, xi_uh = 0.0;
  double hk = 0.0;
  double ek = 0.0, ehat = 0.0, vdev = 0.0;  // NaN outside explicit-qr mode
  double bhat_inv = 0.0;
  bool guard48 = true;
};

struct DiagnosticsOptions {
  bool gram_levels = true;
  bool hk = true;
  bool projection_residuals = true;  // ek, ehat, vdev
  bool bhat_inv = true;              // also drives guard48
  double c4 = 0.0;                   // 0 resolves to sqrt(m + p)
};

// Per-step series. Call step(state) after every completed jbd_step (state.k
// must advance by exactly 1 each time, starting at 1).
//
// Row k reports: levels of U_{k+1} (all current u columns) but of Vt_k and
// Uhat_k (the columns the small matrices of size k are built from), matching
// the bounds the run is checked against.
class DiagnosticsCollector {
 public:
  DiagnosticsCollector(const ProjectionProvider& provider,
                       DiagnosticsOptions opts);

  void step(const JbdState& state);
  const std::vector<DiagnosticsRow>& rows() const { return rows_; }

 private:
  void ensure_capacity(const JbdState& state);
  void add_gram_col(DenseMatrix& gram, std::vector<double>& prefix_max,
                    const DenseMatrix& basis, int col);
  // Appends basis column `col` to an orthonormal set held in q (first
  // `count` columns), Gram-Schmidt with re-passes.
  void append_orthonormal(DenseMatrix& q, int count,
                          std::span<const double> col);

  const ProjectionProvider& provider_;
  DiagnosticsOptions opts_;
  bool explicit_mode_ = false;
  int cap_ = 0;

  std::vector<DiagnosticsRow> rows_;

  // Gram state per basis: symmetric matrices grown a column at a time plus
  // running maxima of the off-diagonal magnitudes over leading slices.
  DenseMatrix g_u_, g_vt_, g_uh_;
  std::vector<double> pmax_u_, pmax_vt_, pmax_uh_;
  int gram_cols_u_ = 0, gram_cols_vt_ = 0, gram_cols_uh_ = 0;

  // Projection-residual state (explicit mode only).
  DenseMatrix qa_, ql_;        // row blocks of Q
  DenseMatrix mu_q_, nv_q_;    // orthonormal bases of U_k and V_k
  DenseMatrix muh_q_, nvh_q_;  // of Uhat_k and Vhat_k
  DenseMatrix t_b_, t_bhat_;   // M^T Q_A N and Mhat^T Q_L Nhat
  DenseMatrix resid_cols_;     // vt residual columns
  DenseMatrix resid_gram_;     // their Gram matrix
  int proj_cols_ = 0;
};

// Fixed column schema used for diagnostics CSV output.
const std::vector<std::string>& diagnostics_columns();

TraceTable diagnostics_table(const std::vector<DiagnosticsRow>& rows);

}  // namespace jbd
