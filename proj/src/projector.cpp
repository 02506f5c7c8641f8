#include "jbd/projector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <utility>

#include "jbd/errors.hpp"
#include "jbd/linalg.hpp"
#include "jbd/vecops.hpp"

namespace jbd {

void SparsePair::validate() const {
  a.validate();
  l.validate();
  if (a.ncols != l.ncols)
    throw ShapeError("stacked pair: column counts differ (" +
                     std::to_string(a.ncols) + " vs " +
                     std::to_string(l.ncols) + ")");
  if (a.nrows + l.nrows < a.ncols)
    throw ShapeError("stacked pair: m + p = " +
                     std::to_string(a.nrows + l.nrows) +
                     " < n = " + std::to_string(a.ncols) +
                     "; stacked matrix cannot have full column rank");
}

void stacked_matvec(const SparsePair& pair, std::span<const double> x,
                    std::span<double> y) {
  const int m = pair.m();
  const int p = pair.p();
  if (static_cast<int>(x.size()) != pair.n())
    throw ShapeError("stacked_matvec: x has length " +
                     std::to_string(x.size()) + ", expected " +
                     std::to_string(pair.n()));
  if (static_cast<int>(y.size()) != m + p)
    throw ShapeError("stacked_matvec: y has length " +
                     std::to_string(y.size()) + ", expected " +
                     std::to_string(m + p));
  csr_matvec(pair.a, x, y.subspan(0, m));
  csr_matvec(pair.l, x, y.subspan(m, p));
}

void stacked_matvec_transpose(const SparsePair& pair,
                              std::span<const double> x,
                              std::span<double> y) {
  const int m = pair.m();
  const int p = pair.p();
  if (static_cast<int>(x.size()) != m + p)
    throw ShapeError("stacked_matvec_transpose: x has length " +
                     std::to_string(x.size()) + ", expected " +
                     std::to_string(m + p));
  if (static_cast<int>(y.size()) != pair.n())
    throw ShapeError("stacked_matvec_transpose: y has length " +
                     std::to_string(y.size()) + ", expected " +
                     std::to_string(pair.n()));
  csr_matvec_transpose(pair.a, x.subspan(0, m), y);
  std::vector<double> tmp(pair.n(), 0.0);
  csr_matvec_transpose(pair.l, x.subspan(m, p), tmp);
  for (int j = 0; j < pair.n(); ++j) y[j] += tmp[j];
}

LsqrResult lsqr_solve(const SparsePair& pair, std::span<const double> b,
                      const LsqrOptions& opts) {
  pair.validate();
  if (!(opts.atol > 0.0) || opts.atol > 1e-8)
    throw InvalidInputError("lsqr: atol must lie in (0, 1e-8], got " +
                            std::to_string(opts.atol));
  const int m = pair.m();
  const int p = pair.p();
  const int n = pair.n();
  if (static_cast<int>(b.size()) != m + p)
    throw ShapeError("lsqr: rhs has length " + std::to_string(b.size()) +
                     ", expected " + std::to_string(m + p));
  const int max_iters = opts.max_iters > 0 ? opts.max_iters : 4 * n;

  LsqrResult res;
  res.x.assign(n, 0.0);

  std::vector<double> u(b.begin(), b.end());
  double beta = nrm2(u);
  if (beta == 0.0) return res;  // zero rhs: x = 0 exactly
  scal(1.0 / beta, u);

  std::vector<double> v(n, 0.0);
  stacked_matvec_transpose(pair, u, v);
  double alpha = nrm2(v);
  if (alpha == 0.0) {
    // b is orthogonal to the range; least-squares solution is x = 0.
    res.residual_norm = beta;
    return res;
  }
  scal(1.0 / alpha, v);

  std::vector<double> w = v;
  std::vector<double> tmp_mp(m + p, 0.0);
  std::vector<double> tmp_n(n, 0.0);

  double phibar = beta;
  double rhobar = alpha;
  double anorm2 = alpha * alpha;  // running estimate of ||[A;L]||_F^2

  const double bnorm = beta;
  double best_normal = alpha * beta;  // ||(AL)^T r|| at x = 0
  std::vector<double> best_x = res.x;
  double best_resid = beta;
  int best_iters = 0;

  for (int it = 1; it <= max_iters; ++it) {
    // beta_{i+1} u_{i+1} = (AL) v_i - alpha_i u_i
    stacked_matvec(pair, v, tmp_mp);
    for (int r = 0; r < m + p; ++r) u[r] = tmp_mp[r] - alpha * u[r];
    beta = nrm2(u);
    if (beta > 0.0) scal(1.0 / beta, u);

    // alpha_{i+1} v_{i+1} = (AL)^T u_{i+1} - beta_{i+1} v_i
    stacked_matvec_transpose(pair, u, tmp_n);
    for (int j = 0; j < n; ++j) v[j] = tmp_n[j] - beta * v[j];
    alpha = nrm2(v);
    if (alpha > 0.0) scal(1.0 / alpha, v);

    anorm2 += alpha * alpha + beta * beta;

    // Givens rotation eliminating beta from the bidiagonal system.
    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    const double t1 = phi / rho;
    const double t2 = -theta / rho;
    for (int j = 0; j < n; ++j) {
      res.x[j] += t1 * w[j];
      w[j] = v[j] + t2 * w[j];
    }

    // ||(AL)^T r_it|| = phibar * alpha * |c|; ||r_it|| = phibar.
    const double normal_res = phibar * alpha * std::fabs(c);
    const double anorm = std::sqrt(anorm2);
    res.iterations = it;
    res.residual_norm = phibar;
    res.normal_residual_norm = normal_res;
    if (normal_res < best_normal) {
      best_normal = normal_res;
      best_x = res.x;
      best_resid = phibar;
      best_iters = it;
    }
    if (normal_res <= opts.atol * anorm * phibar) return res;
    if (phibar <= opts.atol * bnorm) return res;  // consistent system solved
    if (alpha == 0.0 || beta == 0.0) return res;  // exact breakdown: done
  }
  throw ConvergenceError(
      "lsqr: no convergence within " + std::to_string(max_iters) +
          " iterations (best ||(AL)^T r|| = " + std::to_string(best_normal) +
          ")",
      std::move(best_x), best_resid, best_iters);
}

namespace {

class ExplicitQrProvider final : public ProjectionProvider {
 public:
  explicit ExplicitQrProvider(const SparsePair& pair)
      : m_(pair.m()), p_(pair.p()), n_(pair.n()) {
    DenseMatrix stacked(m_ + p_, n_);
    const DenseMatrix da = to_dense(pair.a);
    const DenseMatrix dl = to_dense(pair.l);
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < m_; ++i) stacked(i, j) = da(i, j);
      for (int i = 0; i < p_; ++i) stacked(m_ + i, j) = dl(i, j);
    }
    QrFactors f = householder_qr(stacked);
    q_ = std::move(f.q);
    r_ = std::move(f.r);
  }

  ProjectorMode mode() const override { return ProjectorMode::explicit_qr; }
  int m() const override { return m_; }
  int p() const override { return p_; }
  int n() const override { return n_; }

  void project(std::span<const double> x, std::span<double> y) const override {
    if (static_cast<int>(x.size()) != m_ + p_ ||
        static_cast<int>(y.size()) != m_ + p_)
      throw ShapeError("project: vectors must have length m + p = " +
                       std::to_string(m_ + p_));
    std::vector<double> coeffs(n_, 0.0);
    dense_matvec_transpose(q_, x, coeffs);
    dense_matvec(q_, coeffs, y);
  }

  std::vector<double> lstsq(std::span<const double> rhs) const override {
    if (static_cast<int>(rhs.size()) != m_ + p_)
      throw ShapeError("lstsq: rhs must have length m + p = " +
                       std::to_string(m_ + p_));
    const std::vector<double> coeffs = dense_matvec_transpose(q_, rhs);
    return back_substitute(r_, coeffs);
  }

  const DenseMatrix& q() const override { return q_; }
  DenseMatrix q_a() const override { return row_block(0, m_); }
  DenseMatrix q_l() const override { return row_block(m_, p_); }
  const DenseMatrix& r() const override { return r_; }

 private:
  DenseMatrix row_block(int row0, int rows) const {
    DenseMatrix block(rows, n_);
    for (int j = 0; j < n_; ++j)
      for (int i = 0; i < rows; ++i) block(i, j) = q_(row0 + i, j);
    return block;
  }

  int m_, p_, n_;
  DenseMatrix q_;
  DenseMatrix r_;
};

class LsqrProvider final : public ProjectionProvider {
 public:
  LsqrProvider(const SparsePair& pair, const LsqrOptions& opts)
      : pair_(pair), opts_(opts) {
    pair_.validate();
    if (!(opts_.atol > 0.0) || opts_.atol > 1e-8)
      throw InvalidInputError("lsqr projector: atol must lie in (0, 1e-8]");
  }

  ProjectorMode mode() const override { return ProjectorMode::lsqr; }
  int m() const override { return pair_.m(); }
  int p() const override { return pair_.p(); }
  int n() const override { return pair_.n(); }

  void project(std::span<const double> x, std::span<double> y) const override {
    const int mp = pair_.m() + pair_.p();
    if (static_cast<int>(x.size()) != mp || static_cast<int>(y.size()) != mp)
      throw ShapeError("project: vectors must have length m + p = " +
                       std::to_string(mp));
    const LsqrResult sol = lsqr_solve(pair_, x, opts_);
    stacked_matvec(pair_, sol.x, y);
  }

  std::vector<double> lstsq(std::span<const double> rhs) const override {
    return lsqr_solve(pair_, rhs, opts_).x;
  }

  const DenseMatrix& q() const override { return unsupported(); }
  DenseMatrix q_a() const override { return unsupported(); }
  DenseMatrix q_l() const override { return unsupported(); }
  const DenseMatrix& r() const override { return unsupported(); }

 private:
  [[noreturn]] static const DenseMatrix& unsupported() {
    throw UnsupportedModeError(
        "QR factor access requires the explicit-qr projector backend");
  }

  SparsePair pair_;
  LsqrOptions opts_;
};

}  // namespace

std::unique_ptr<ProjectionProvider> make_explicit_qr_provider(
    const SparsePair& pair) {
  pair.validate();
  return std::make_unique<ExplicitQrProvider>(pair);
}

std::unique_ptr<ProjectionProvider> make_lsqr_provider(const SparsePair& pair,
                                                       const LsqrOptions& opts) {
  return std::make_unique<LsqrProvider>(pair, opts);
}

}  // namespace jbd
