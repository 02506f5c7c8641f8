#include "jbd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jbd/bidiag_svd.hpp"
#include "jbd/errors.hpp"
#include "jbd/linalg.hpp"
#include "jbd/vecops.hpp"

namespace jbd {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double guard_rhs(int k, double c4) {
  return c4 / ((2.0 * k + 1.0) * std::sqrt(kEps));
}

// k x k square slice of the lower bidiagonal subtracted in place.
void subtract_b_square(DenseMatrix& g, const BidiagPair& coeffs, int k) {
  for (int c = 0; c < k; ++c) {
    g(c, c) -= coeffs.alpha[c];
    if (c + 1 < k) g(c + 1, c) -= coeffs.beta[c + 1];
  }
}

void subtract_bhat(DenseMatrix& g, const BidiagPair& coeffs, int k) {
  for (int c = 0; c < k; ++c) {
    g(c, c) -= coeffs.alpha_hat[c];
    if (c + 1 < k) g(c, c + 1) -= coeffs.beta_hat[c];
  }
}

}  // namespace

std::pair<double, double> ortho_levels(const DenseMatrix& basis) {
  const DenseMatrix g = gram(basis);
  const int k = g.nrows;
  double kappa = 0.0;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < j; ++i) kappa = std::max(kappa, std::fabs(g(i, j)));
  DenseMatrix s(k, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) s(i, j) = (i == j ? 1.0 : 0.0) - g(i, j);
  return {kappa, sym_spectral_norm(s)};
}

double hk_residual(const BidiagPair& coeffs, int k) {
  if (k < 1) throw InvalidInputError("hk_residual: k must be >= 1");
  if (k > static_cast<int>(coeffs.alpha.size()) ||
      k + 1 > static_cast<int>(coeffs.beta.size()) ||
      k > static_cast<int>(coeffs.alpha_hat.size()) ||
      k - 1 > static_cast<int>(coeffs.beta_hat.size()))
    throw InvalidInputError("hk_residual: not enough coefficients for k = " +
                            std::to_string(k));
  std::vector<double> d(k), e(std::max(0, k - 1));
  for (int i = 0; i < k; ++i) {
    const double bh = i > 0 ? coeffs.beta_hat[i - 1] : 0.0;
    d[i] = 1.0 - coeffs.alpha[i] * coeffs.alpha[i] -
           coeffs.beta[i + 1] * coeffs.beta[i + 1] -
           coeffs.alpha_hat[i] * coeffs.alpha_hat[i] - bh * bh;
  }
  for (int i = 0; i + 1 < k; ++i)
    e[i] = -(coeffs.alpha[i + 1] * coeffs.beta[i + 1] -
             coeffs.alpha_hat[i] * coeffs.beta_hat[i]);
  const double hi = tridiag_eig_largest(d, e);
  const double lo = tridiag_eig_smallest(d, e);
  return std::max(std::fabs(hi), std::fabs(lo));
}

double ek_residual(const JbdState& state, const ProjectionProvider& provider) {
  if (provider.mode() != ProjectorMode::explicit_qr)
    throw UnsupportedModeError(
        "ek_residual needs the explicit-qr projector (Q_A unavailable)");
  const int k = state.k;
  if (k < 1) throw InvalidInputError("ek_residual: no completed steps");
  const DenseMatrix u_k = state.u_basis.leading_cols(k);
  const DenseMatrix m_q = householder_qr(u_k).q;
  const DenseMatrix vt_k = state.vt_basis.leading_cols(k);
  const DenseMatrix v = matmul_at_b(provider.q(), vt_k);
  const DenseMatrix n_q = householder_qr(v).q;
  DenseMatrix g = matmul_at_b(m_q, matmul(provider.q_a(), n_q));
  subtract_b_square(g, state.coeffs, k);
  return spectral_norm(g);
}

double ehat_residual(const JbdState& state, const ProjectionProvider& provider) {
  if (provider.mode() != ProjectorMode::explicit_qr)
    throw UnsupportedModeError(
        "ehat_residual needs the explicit-qr projector (Q_L unavailable)");
  const int k = state.k;
  if (k < 1) throw InvalidInputError("ehat_residual: no completed steps");
  const DenseMatrix uh_k = state.uhat_basis.leading_cols(k);
  const DenseMatrix m_q = householder_qr(uh_k).q;
  const DenseMatrix vt_k = state.vt_basis.leading_cols(k);
  DenseMatrix v = matmul_at_b(provider.q(), vt_k);
  for (int j = 1; j < k; j += 2) {
    double* c = v.col(j);
    for (int i = 0; i < v.nrows; ++i) c[i] = -c[i];
  }
  const DenseMatrix n_q = householder_qr(v).q;
  DenseMatrix g = matmul_at_b(m_q, matmul(provider.q_l(), n_q));
  subtract_bhat(g, state.coeffs, k);
  return spectral_norm(g);
}

double vdev_norm(const JbdState& state, const ProjectionProvider& provider) {
  if (provider.mode() != ProjectorMode::explicit_qr)
    throw UnsupportedModeError(
        "vdev_norm needs the explicit-qr projector (Q unavailable)");
  const int k = state.k;
  if (k < 1) throw InvalidInputError("vdev_norm: no completed steps");
  const DenseMatrix vt_k = state.vt_basis.leading_cols(k);
  const DenseMatrix qtv = matmul_at_b(provider.q(), vt_k);
  const DenseMatrix qqtv = matmul(provider.q(), qtv);
  DenseMatrix d(vt_k.nrows, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < vt_k.nrows; ++i) d(i, j) = vt_k(i, j) - qqtv(i, j);
  return spectral_norm(d);
}

bool guard_48(const BidiagPair& coeffs, int k, double c4) {
  if (!(c4 > 0.0)) throw InvalidInputError("guard_48: c4 must be positive");
  const double inv = inv_norm(coeffs, BidiagSide::bhat, k);
  return inv * inv * inv <= guard_rhs(k, c4);
}

DiagnosticsCollector::DiagnosticsCollector(const ProjectionProvider& provider,
                                           DiagnosticsOptions opts)
    : provider_(provider), opts_(opts) {
  explicit_mode_ = provider.mode() == ProjectorMode::explicit_qr;
  if (opts_.c4 == 0.0)
    opts_.c4 = std::sqrt(static_cast<double>(provider.m() + provider.p()));
  if (!(opts_.c4 > 0.0))
    throw InvalidInputError("diagnostics: c4 must be positive");
  if (opts_.projection_residuals && explicit_mode_) {
    qa_ = provider.q_a();
    ql_ = provider.q_l();
  }
}

namespace {

// Copies the used top-left block into a larger zeroed matrix.
DenseMatrix regrow(const DenseMatrix& old, int rows, int cols, int used_rows,
                   int used_cols) {
  DenseMatrix next(rows, cols);
  for (int j = 0; j < used_cols; ++j)
    for (int i = 0; i < used_rows; ++i) next(i, j) = old(i, j);
  return next;
}

}  // namespace

void DiagnosticsCollector::ensure_capacity(const JbdState& state) {
  const int needed = state.k + 1;
  if (needed <= cap_) return;
  const int cap = std::max(needed, std::max(2 * cap_, state.planned_steps + 1));
  const int m = provider_.m(), p = provider_.p(), n = provider_.n();
  const int mp = m + p;
  if (opts_.gram_levels) {
    g_u_ = regrow(g_u_, cap, cap, gram_cols_u_, gram_cols_u_);
    g_vt_ = regrow(g_vt_, cap, cap, gram_cols_vt_, gram_cols_vt_);
    g_uh_ = regrow(g_uh_, cap, cap, gram_cols_uh_, gram_cols_uh_);
    pmax_u_.resize(cap, 0.0);
    pmax_vt_.resize(cap, 0.0);
    pmax_uh_.resize(cap, 0.0);
  }
  if (opts_.projection_residuals && explicit_mode_) {
    mu_q_ = regrow(mu_q_, m, cap, m, proj_cols_);
    nv_q_ = regrow(nv_q_, n, cap, n, proj_cols_);
    muh_q_ = regrow(muh_q_, p, cap, p, proj_cols_);
    nvh_q_ = regrow(nvh_q_, n, cap, n, proj_cols_);
    t_b_ = regrow(t_b_, cap, cap, proj_cols_, proj_cols_);
    t_bhat_ = regrow(t_bhat_, cap, cap, proj_cols_, proj_cols_);
    resid_cols_ = regrow(resid_cols_, mp, cap, mp, proj_cols_);
    resid_gram_ = regrow(resid_gram_, cap, cap, proj_cols_, proj_cols_);
  }
  cap_ = cap;
}

void DiagnosticsCollector::add_gram_col(DenseMatrix& gram,
                                        std::vector<double>& prefix_max,
                                        const DenseMatrix& basis, int col) {
  double colmax = 0.0;
  for (int i = 0; i <= col; ++i) {
    const double val = dot(basis.col_span(i), basis.col_span(col));
    gram(i, col) = val;
    gram(col, i) = val;
    if (i < col) colmax = std::max(colmax, std::fabs(val));
  }
  prefix_max[col] = std::max(col > 0 ? prefix_max[col - 1] : 0.0, colmax);
}

void DiagnosticsCollector::append_orthonormal(DenseMatrix& q, int count,
                                              std::span<const double> col) {
  std::vector<double> v(col.begin(), col.end());
  double ref = nrm2(v);
  for (int pass = 0; pass < 4 && count > 0; ++pass) {
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      const double c = dot(q.col_span(i), v);
      axpy(-c, q.col_span(i), v);
      worst = std::max(worst, std::fabs(c));
    }
    if (worst <= 10.0 * kEps * ref) break;
    ref = nrm2(v);
  }
  const double norm = nrm2(v);
  if (norm > 0.0) {
    scal(1.0 / norm, v);
  } else {
    // fully dependent input; fall back to a deterministic unit direction
    std::fill(v.begin(), v.end(), 0.0);
    v[count % v.size()] = 1.0;
  }
  std::copy(v.begin(), v.end(), q.col(count));
}

void DiagnosticsCollector::step(const JbdState& state) {
  const int k = state.k;
  if (k != static_cast<int>(rows_.size()) + 1)
    throw InvalidInputError("diagnostics collector expected step " +
                            std::to_string(rows_.size() + 1) + ", got " +
                            std::to_string(k));
  ensure_capacity(state);
  DiagnosticsRow row;
  row.k = k;

  if (opts_.gram_levels) {
    while (gram_cols_u_ < k + 1) {
      add_gram_col(g_u_, pmax_u_, state.u_basis, gram_cols_u_);
      ++gram_cols_u_;
    }
    while (gram_cols_vt_ < k) {
      add_gram_col(g_vt_, pmax_vt_, state.vt_basis, gram_cols_vt_);
      ++gram_cols_vt_;
    }
    while (gram_cols_uh_ < k) {
      add_gram_col(g_uh_, pmax_uh_, state.uhat_basis, gram_cols_uh_);
      ++gram_cols_uh_;
    }
    row.kappa_u = pmax_u_[k];
    row.kappa_vt = pmax_vt_[k - 1];
    row.kappa_uh = pmax_uh_[k - 1];
    const auto xi_of = [](const DenseMatrix& g, int size) {
      DenseMatrix s(size, size);
      for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i)
          s(i, j) = (i == j ? 1.0 : 0.0) - g(i, j);
      return sym_spectral_norm(s);
    };
    row.xi_u = xi_of(g_u_, k + 1);
    row.xi_vt = xi_of(g_vt_, k);
    row.xi_uh = xi_of(g_uh_, k);
  }

  if (opts_.hk) row.hk = hk_residual(state.coeffs, k);

  if (opts_.bhat_inv) {
    row.bhat_inv = inv_norm(state.coeffs, BidiagSide::bhat, k);
    row.guard48 =
        row.bhat_inv * row.bhat_inv * row.bhat_inv <= guard_rhs(k, opts_.c4);
  }

  if (opts_.projection_residuals) {
    if (!explicit_mode_) {
      row.ek = kNan;
      row.ehat = kNan;
      row.vdev = kNan;
    } else {
      const DenseMatrix& q = provider_.q();
      while (proj_cols_ < k) {
        const int j = proj_cols_;
        append_orthonormal(mu_q_, j, state.u_basis.col_span(j));
        append_orthonormal(muh_q_, j, state.uhat_basis.col_span(j));
        const std::span<const double> vt_col = state.vt_basis.col_span(j);
        std::vector<double> v_new = dense_matvec_transpose(q, vt_col);
        append_orthonormal(nv_q_, j, v_new);
        std::vector<double> vhat_new = v_new;
        if (j % 2 == 1)
          for (double& x : vhat_new) x = -x;
        append_orthonormal(nvh_q_, j, vhat_new);

        // grow M^T Q_A N by one column and one row
        std::vector<double> w1 = dense_matvec(qa_, nv_q_.col_span(j));
        for (int i = 0; i <= j; ++i) t_b_(i, j) = dot(mu_q_.col_span(i), w1);
        std::vector<double> w2 = dense_matvec_transpose(qa_, mu_q_.col_span(j));
        for (int c = 0; c < j; ++c) t_b_(j, c) = dot(w2, nv_q_.col_span(c));

        std::vector<double> h1 = dense_matvec(ql_, nvh_q_.col_span(j));
        for (int i = 0; i <= j; ++i) t_bhat_(i, j) = dot(muh_q_.col_span(i), h1);
        std::vector<double> h2 =
            dense_matvec_transpose(ql_, muh_q_.col_span(j));
        for (int c = 0; c < j; ++c) t_bhat_(j, c) = dot(h2, nvh_q_.col_span(c));

        // vt drift column and its Gram row
        std::vector<double> back = dense_matvec(q, v_new);
        double* rc = resid_cols_.col(j);
        for (int i = 0; i < resid_cols_.nrows; ++i) rc[i] = vt_col[i] - back[i];
        for (int i = 0; i <= j; ++i) {
          const double val = dot(resid_cols_.col_span(i), resid_cols_.col_span(j));
          resid_gram_(i, j) = val;
          resid_gram_(j, i) = val;
        }
        ++proj_cols_;
      }
      DenseMatrix rb(k, k);
      DenseMatrix rbh(k, k);
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) {
          rb(i, j) = t_b_(i, j);
          rbh(i, j) = t_bhat_(i, j);
        }
      subtract_b_square(rb, state.coeffs, k);
      subtract_bhat(rbh, state.coeffs, k);
      row.ek = spectral_norm(rb);
      row.ehat = spectral_norm(rbh);
      DenseMatrix rg(k, k);
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) rg(i, j) = resid_gram_(i, j);
      row.vdev = std::sqrt(std::max(0.0, sym_spectral_norm(rg)));
    }
  }

  rows_.push_back(row);
}

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols = {
      "k",  "kappa_u", "xi_u", "kappa_vt", "xi_vt",    "kappa_uh", "xi_uh",
      "hk", "ek",      "ehat", "vdev",     "bhat_inv", "guard48"};
  return cols;
}

TraceTable diagnostics_table(const std::vector<DiagnosticsRow>& rows) {
  TraceTable t;
  t.columns = diagnostics_columns();
  t.rows.reserve(rows.size());
  for (const DiagnosticsRow& r : rows) {
    t.rows.push_back({static_cast<double>(r.k), r.kappa_u, r.xi_u, r.kappa_vt,
                      r.xi_vt, r.kappa_uh, r.xi_uh, r.hk, r.ek, r.ehat, r.vdev,
                      r.bhat_inv, r.guard48 ? 1.0 : 0.0});
  }
  return t;
}

}  // namespace jbd
