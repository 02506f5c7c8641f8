#include "jbd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jbd/errors.hpp"
#include "jbd/vecops.hpp"

namespace jbd {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

QrFactors householder_qr(const DenseMatrix& a) {
  const int m = a.nrows, n = a.ncols;
  if (m < n) throw ShapeError("householder_qr: matrix must have nrows >= ncols");

  std::vector<double> col_norms(n);
  for (int j = 0; j < n; ++j) col_norms[j] = nrm2(a.col_span(j));

  DenseMatrix work = a;                // transformed in place
  std::vector<double> tau(n, 0.0);     // reflector scales; v is stored below the diagonal
  for (int j = 0; j < n; ++j) {
    double* cj = work.col(j);
    const double x0 = cj[j];
    double tail = 0.0;
    for (int i = j + 1; i < m; ++i) tail = std::max(tail, std::fabs(cj[i]));

    double beta;
    if (tail == 0.0) {
      beta = x0;
      tau[j] = 0.0;
    } else {
      double ssq = 0.0;
      for (int i = j + 1; i < m; ++i) {
        const double t = cj[i] / tail;
        ssq += t * t;
      }
      const double xnorm = tail * std::sqrt(ssq);
      beta = -std::copysign(std::hypot(x0, xnorm), x0);
      tau[j] = (beta - x0) / beta;
      const double inv = 1.0 / (x0 - beta);
      for (int i = j + 1; i < m; ++i) cj[i] *= inv;
    }
    cj[j] = beta;

    if (std::fabs(beta) <= m * kEps * col_norms[j])
      throw RankDeficientError("householder_qr: matrix is numerically rank deficient", j);

    if (tau[j] != 0.0) {
      for (int k = j + 1; k < n; ++k) {
        double* ck = work.col(k);
        double s = ck[j];
        for (int i = j + 1; i < m; ++i) s += cj[i] * ck[i];
        s *= tau[j];
        ck[j] -= s;
        for (int i = j + 1; i < m; ++i) ck[i] -= s * cj[i];
      }
    }
  }

  QrFactors out;
  out.r = DenseMatrix(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) out.r(i, j) = work(i, j);

  // Accumulate q = H_0 * ... * H_{n-1} applied to the first n identity columns.
  out.q = DenseMatrix(m, n);
  for (int j = 0; j < n; ++j) out.q(j, j) = 1.0;
  for (int j = n - 1; j >= 0; --j) {
    if (tau[j] == 0.0) continue;
    const double* vj = work.col(j);
    for (int k = 0; k < n; ++k) {
      double* qk = out.q.col(k);
      double s = qk[j];
      for (int i = j + 1; i < m; ++i) s += vj[i] * qk[i];
      s *= tau[j];
      qk[j] -= s;
      for (int i = j + 1; i < m; ++i) qk[i] -= s * vj[i];
    }
  }

  // Fix the diagonal signs so every r_jj is nonnegative.
  for (int j = 0; j < n; ++j) {
    if (out.r(j, j) < 0.0) {
      for (int k = j; k < n; ++k) out.r(j, k) = -out.r(j, k);
      scal(-1.0, out.q.col_span(j));
    }
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> mgs_orthogonalize(
    std::span<const double> vec, const DenseMatrix& basis, std::span<const int> indices) {
  if (static_cast<int>(vec.size()) != basis.nrows)
    throw ShapeError("mgs_orthogonalize: vector length does not match basis rows");
  std::vector<double> v(vec.begin(), vec.end());
  std::vector<double> coeffs;
  coeffs.reserve(indices.size());
  for (std::size_t t = 0; t < indices.size(); ++t) {
    const int j = indices[t];
    if (j < 0 || j >= basis.ncols) throw InvalidInputError("mgs_orthogonalize: index out of range");
    if (t > 0 && indices[t - 1] >= j)
      throw InvalidInputError("mgs_orthogonalize: indices must be strictly ascending");
    const double c = dot(basis.col_span(j), v);
    axpy(-c, basis.col_span(j), v);
    coeffs.push_back(c);
  }
  return {std::move(v), std::move(coeffs)};
}

ReorthResult reorthogonalize(std::span<const double> vec, const DenseMatrix& basis,
                             std::span<const int> indices) {
  ReorthResult out;
  if (indices.empty()) {
    out.vec.assign(vec.begin(), vec.end());
    return out;
  }
  const double scale = nrm2(vec);
  auto [v1, c1] = mgs_orthogonalize(vec, basis, indices);
  out.vec = std::move(v1);
  out.coefficients = std::move(c1);
  out.passes = 1;

  double worst = 0.0;
  for (int j : indices) worst = std::max(worst, std::fabs(dot(basis.col_span(j), out.vec)));
  if (worst > 10.0 * kEps * scale) {
    auto [v2, c2] = mgs_orthogonalize(out.vec, basis, indices);
    out.vec = std::move(v2);
    for (std::size_t t = 0; t < c2.size(); ++t) out.coefficients[t] += c2[t];
    out.passes = 2;
  }
  return out;
}

SvdResult dense_svd_oracle(const DenseMatrix& a) {
  const bool transposed = a.nrows < a.ncols;
  DenseMatrix g = a;
  if (transposed) {
    g = DenseMatrix(a.ncols, a.nrows);
    for (int j = 0; j < a.ncols; ++j)
      for (int i = 0; i < a.nrows; ++i) g(j, i) = a(i, j);
  }
  const int m = g.nrows, n = g.ncols;
  DenseMatrix v = DenseMatrix::identity(n);

  // One-sided Jacobi: rotate column pairs until all of them are orthogonal
  // relative to their norms.
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    int rotations = 0;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double* gp = g.col(p);
        double* gq = g.col(q);
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < m; ++i) {
          app += gp[i] * gp[i];
          aqq += gq[i] * gq[i];
          apq += gp[i] * gq[i];
        }
        if (std::fabs(apq) <= kEps * std::sqrt(app * aqq) || apq == 0.0) continue;
        ++rotations;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, zeta) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (int i = 0; i < m; ++i) {
          const double x = gp[i], y = gq[i];
          gp[i] = cs * x - sn * y;
          gq[i] = sn * x + cs * y;
        }
        double* vp = v.col(p);
        double* vq = v.col(q);
        for (int i = 0; i < n; ++i) {
          const double x = vp[i], y = vq[i];
          vp[i] = cs * x - sn * y;
          vq[i] = sn * x + cs * y;
        }
      }
    }
    if (rotations == 0) break;
  }

  std::vector<double> sigma(n);
  for (int j = 0; j < n; ++j) sigma[j] = nrm2(g.col_span(j));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return sigma[i] > sigma[j]; });

  SvdResult out;
  out.sigma.resize(n);
  out.u = DenseMatrix(m, n);
  out.v = DenseMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    const int s = order[j];
    out.sigma[j] = sigma[s];
    std::copy(v.col(s), v.col(s) + n, out.v.col(j));
    if (sigma[s] > 0.0) {
      const double inv = 1.0 / sigma[s];
      const double* gs = g.col(s);
      double* uj = out.u.col(j);
      for (int i = 0; i < m; ++i) uj[i] = gs[i] * inv;
    }
  }
  // Columns for exactly zero singular values: fill with unit vectors
  // orthogonalized against what is already there.
  for (int j = 0; j < n; ++j) {
    if (out.sigma[j] > 0.0) continue;
    for (int seed = 0; seed < m; ++seed) {
      std::vector<double> cand(m, 0.0);
      cand[seed] = 1.0;
      for (int t = 0; t < n; ++t) {
        if (t == j || (out.sigma[t] == 0.0 && t > j)) continue;
        const double c = dot(out.u.col_span(t), cand);
        axpy(-c, out.u.col_span(t), cand);
      }
      const double nn = nrm2(cand);
      if (nn > 0.5) {
        scal(1.0 / nn, {cand.data(), cand.size()});
        std::copy(cand.begin(), cand.end(), out.u.col(j));
        break;
      }
    }
  }

  if (transposed) std::swap(out.u, out.v);
  return out;
}

DenseMatrix gram(const DenseMatrix& w) { return matmul_at_b(w, w); }

void sym_tridiagonalize(DenseMatrix a, std::vector<double>& d, std::vector<double>& e) {
  const int n = a.nrows;
  if (a.ncols != n) throw ShapeError("sym_tridiagonalize: matrix must be square");
  d.assign(n, 0.0);
  e.assign(n > 0 ? n - 1 : 0, 0.0);
  if (n == 0) return;

  std::vector<double> v(n), w(n);
  for (int j = 0; j < n - 2; ++j) {
    // Householder vector for column j below the diagonal.
    double tail = 0.0;
    for (int i = j + 2; i < n; ++i) tail = std::max(tail, std::fabs(a(i, j)));
    const double x0 = a(j + 1, j);
    if (tail == 0.0) {
      d[j] = a(j, j);
      e[j] = x0;
      continue;
    }
    double ssq = 0.0;
    for (int i = j + 2; i < n; ++i) {
      const double t = a(i, j) / tail;
      ssq += t * t;
    }
    const double xnorm = tail * std::sqrt(ssq);
    const double beta = -std::copysign(std::hypot(x0, xnorm), x0);
    const double tau = (beta - x0) / beta;
    const double inv = 1.0 / (x0 - beta);

    v.assign(n, 0.0);
    v[j + 1] = 1.0;
    for (int i = j + 2; i < n; ++i) v[i] = a(i, j) * inv;

    // w = tau * A v; then rank-2 update A -= v w' + w v' with
    // w := w - (tau/2) (v' A v) v folded in.
    std::fill(w.begin(), w.end(), 0.0);
    for (int c = j + 1; c < n; ++c) {
      const double vc = v[c];
      const double* ac = a.col(c);
      for (int r = j + 1; r < n; ++r) w[r] += ac[r] * vc;
    }
    for (int r = j + 1; r < n; ++r) w[r] *= tau;
    double vtw = 0.0;
    for (int r = j + 1; r < n; ++r) vtw += v[r] * w[r];
    const double half = 0.5 * tau * vtw;
    for (int r = j + 1; r < n; ++r) w[r] -= half * v[r];
    for (int c = j + 1; c < n; ++c) {
      double* ac = a.col(c);
      const double vc = v[c], wc = w[c];
      for (int r = j + 1; r < n; ++r) ac[r] -= v[r] * wc + w[r] * vc;
    }

    d[j] = a(j, j);
    e[j] = beta;
  }
  if (n >= 2) {
    d[n - 2] = a(n - 2, n - 2);
    e[n - 2] = a(n - 1, n - 2);
  }
  d[n - 1] = a(n - 1, n - 1);
}

namespace {

// Number of eigenvalues of the tridiagonal (d, e) strictly below x.
int sturm_count(std::span<const double> d, std::span<const double> e, double x) {
  const int n = static_cast<int>(d.size());
  int count = 0;
  double q = d[0] - x;
  if (q < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    double denom = q;
    if (denom == 0.0) denom = kEps * (std::fabs(e[i - 1]) + kEps);
    q = d[i] - x - e[i - 1] * e[i - 1] / denom;
    if (q < 0.0) ++count;
  }
  return count;
}

double tridiag_eig_boundary(std::span<const double> d, std::span<const double> e, int want_below) {
  const int n = static_cast<int>(d.size());
  double lo = d[0], hi = d[0];
  for (int i = 0; i < n; ++i) {
    const double left = (i > 0) ? std::fabs(e[i - 1]) : 0.0;
    const double right = (i < n - 1) ? std::fabs(e[i]) : 0.0;
    lo = std::min(lo, d[i] - left - right);
    hi = std::max(hi, d[i] + left + right);
  }
  const double pad = kEps * std::max({std::fabs(lo), std::fabs(hi), 1e-300});
  lo -= pad;
  hi += pad;
  for (int it = 0; it < 210; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(d, e, mid) >= want_below)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double tridiag_eig_largest(std::span<const double> d, std::span<const double> e) {
  if (d.empty()) throw InvalidInputError("tridiag_eig_largest: empty matrix");
  return tridiag_eig_boundary(d, e, static_cast<int>(d.size()));
}

double tridiag_eig_smallest(std::span<const double> d, std::span<const double> e) {
  if (d.empty()) throw InvalidInputError("tridiag_eig_smallest: empty matrix");
  return tridiag_eig_boundary(d, e, 1);
}

double sym_spectral_norm(const DenseMatrix& s) {
  if (s.nrows != s.ncols) throw ShapeError("sym_spectral_norm: matrix must be square");
  if (s.nrows == 0) return 0.0;
  if (s.nrows == 1) return std::fabs(s(0, 0));
  std::vector<double> d, e;
  sym_tridiagonalize(s, d, e);
  return std::max(std::fabs(tridiag_eig_largest(d, e)), std::fabs(tridiag_eig_smallest(d, e)));
}

double spectral_norm(const DenseMatrix& a) {
  if (a.nrows == 0 || a.ncols == 0) return 0.0;
  DenseMatrix g;
  if (a.ncols <= a.nrows) {
    g = matmul_at_b(a, a);
  } else {
    g = DenseMatrix(a.nrows, a.nrows);
    for (int i = 0; i < a.nrows; ++i)
      for (int j = 0; j < a.nrows; ++j) {
        double acc = 0.0;
        for (int t = 0; t < a.ncols; ++t) acc += a(i, t) * a(j, t);
        g(i, j) = acc;
      }
  }
  return std::sqrt(std::max(0.0, sym_spectral_norm(g)));
}

std::vector<double> back_substitute(const DenseMatrix& r, std::span<const double> rhs) {
  const int n = r.nrows;
  if (r.ncols != n) throw ShapeError("back_substitute: matrix must be square");
  if (static_cast<int>(rhs.size()) != n) throw ShapeError("back_substitute: rhs length mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= r(i, j) * x[j];
    if (r(i, i) == 0.0) throw SingularMatrixError("back_substitute: zero pivot");
    x[i] /= r(i, i);
  }
  return x;
}

}  // namespace jbd
