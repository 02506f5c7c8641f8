#include "jbd/bidiag_svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "jbd/errors.hpp"

namespace jbd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// r = sqrt(f^2 + g^2) >= 0, [c s; -s c] * (f, g) = (r, 0).
void rotg(double f, double g, double& c, double& s, double& r) {
  if (g == 0.0) {
    c = 1.0;
    s = 0.0;
    r = f;
  } else if (f == 0.0) {
    c = 0.0;
    s = 1.0;
    r = g;
  } else {
    r = std::hypot(f, g);
    c = f / r;
    s = g / r;
  }
}

void rot_cols(DenseMatrix* m, int i, int j, double c, double s) {
  if (m == nullptr) return;
  double* a = m->col(i);
  double* b = m->col(j);
  for (int r = 0; r < m->nrows; ++r) {
    const double t = c * a[r] + s * b[r];
    b[r] = -s * a[r] + c * b[r];
    a[r] = t;
  }
}

// Singular values of [f g; 0 h]; |ssmax| >= |ssmin|.
void las2(double f, double g, double h, double& ssmin, double& ssmax) {
  const double fa = std::fabs(f);
  const double ga = std::fabs(g);
  const double ha = std::fabs(h);
  const double fhmn = std::min(fa, ha);
  const double fhmx = std::max(fa, ha);
  if (fhmn == 0.0) {
    ssmin = 0.0;
    if (fhmx == 0.0) {
      ssmax = ga;
    } else {
      const double lo = std::min(fhmx, ga);
      const double hi = std::max(fhmx, ga);
      ssmax = hi * std::sqrt(1.0 + (lo / hi) * (lo / hi));
    }
    return;
  }
  if (ga < fhmx) {
    const double as = 1.0 + fhmn / fhmx;
    const double at = (fhmx - fhmn) / fhmx;
    const double au = (ga / fhmx) * (ga / fhmx);
    const double c = 2.0 / (std::sqrt(as * as + au) + std::sqrt(at * at + au));
    ssmin = fhmn * c;
    ssmax = fhmx / c;
  } else {
    const double au = fhmx / ga;
    if (au == 0.0) {
      ssmin = (fhmn * fhmx) / ga;
      ssmax = ga;
    } else {
      const double as = 1.0 + fhmn / fhmx;
      const double at = (fhmx - fhmn) / fhmx;
      const double asu = as * au;
      const double atu = at * au;
      const double c =
          1.0 / (std::sqrt(1.0 + asu * asu) + std::sqrt(1.0 + atu * atu));
      ssmin = (fhmn * c * au) * 2.0;
      ssmax = ga / (c + c);
    }
  }
}

double sign_of(double a, double b) { return b >= 0.0 ? std::fabs(a) : -std::fabs(a); }

// SVD of [f g; 0 h] with rotation angles:
// [csl snl; -snl csl] [f g; 0 h] [csr -snr; snr csr] = diag(ssmax, ssmin).
void lasv2(double f, double g, double h, double& ssmin, double& ssmax,
           double& snr, double& csr, double& snl, double& csl) {
  double ft = f, fa = std::fabs(f);
  double ht = h, ha = std::fabs(h);
  int pmax = 1;
  const bool swap = ha > fa;
  if (swap) {
    pmax = 3;
    std::swap(ft, ht);
    std::swap(fa, ha);
  }
  const double gt = g;
  const double ga = std::fabs(gt);
  double clt = 0.0, crt = 0.0, slt = 0.0, srt = 0.0;
  if (ga == 0.0) {
    ssmin = ha;
    ssmax = fa;
    clt = 1.0;
    crt = 1.0;
    slt = 0.0;
    srt = 0.0;
  } else {
    bool gasmal = true;
    if (ga > fa) {
      pmax = 2;
      if (fa / ga < kEps) {
        gasmal = false;
        ssmax = ga;
        if (ha > 1.0)
          ssmin = fa / (ga / ha);
        else
          ssmin = (fa / ga) * ha;
        clt = 1.0;
        slt = ht / gt;
        srt = 1.0;
        crt = ft / gt;
      }
    }
    if (gasmal) {
      const double d = fa - ha;
      double l;
      if (d == fa)
        l = 1.0;  // infinite f / h handled gracefully
      else
        l = d / fa;
      const double m2 = gt / ft;
      double t = 2.0 - l;
      const double mm = m2 * m2;
      const double tt = t * t;
      const double s2 = std::sqrt(tt + mm);
      double r2;
      if (l == 0.0)
        r2 = std::fabs(m2);
      else
        r2 = std::sqrt(l * l + mm);
      const double a = 0.5 * (s2 + r2);
      ssmin = ha / a;
      ssmax = fa * a;
      if (mm == 0.0) {
        if (l == 0.0)
          t = sign_of(2.0, ft) * sign_of(1.0, gt);
        else
          t = gt / sign_of(d, ft) + m2 / t;
      } else {
        t = (m2 / (s2 + t) + m2 / (r2 + l)) * (1.0 + a);
      }
      const double l2 = std::sqrt(t * t + 4.0);
      crt = 2.0 / l2;
      srt = t / l2;
      clt = (crt + srt * m2) / a;
      slt = (ht / ft) * srt / a;
    }
  }
  if (swap) {
    csl = srt;
    snl = crt;
    csr = slt;
    snr = clt;
  } else {
    csl = clt;
    snl = slt;
    csr = crt;
    snr = srt;
  }
  double tsign = 0.0;
  if (pmax == 1) tsign = sign_of(1.0, csr) * sign_of(1.0, csl) * sign_of(1.0, f);
  if (pmax == 2) tsign = sign_of(1.0, snr) * sign_of(1.0, csl) * sign_of(1.0, g);
  if (pmax == 3) tsign = sign_of(1.0, snr) * sign_of(1.0, snl) * sign_of(1.0, h);
  ssmax = sign_of(ssmax, tsign);
  ssmin = sign_of(ssmin, tsign * sign_of(1.0, f) * sign_of(1.0, h));
}

void zero_shift_sweep(std::vector<double>& d, std::vector<double>& e, int lo,
                      int hi, DenseMatrix* u, DenseMatrix* v) {
  double cs = 1.0, sn = 0.0, r = 0.0;
  double oldcs = 1.0, oldsn = 0.0;
  for (int i = lo; i < hi; ++i) {
    rotg(d[i] * cs, e[i], cs, sn, r);
    if (i > lo) e[i - 1] = oldsn * r;
    rotg(oldcs * r, d[i + 1] * sn, oldcs, oldsn, d[i]);
    rot_cols(v, i, i + 1, cs, sn);
    rot_cols(u, i, i + 1, oldcs, oldsn);
  }
  const double h = d[hi] * cs;
  d[hi] = h * oldcs;
  e[hi - 1] = h * oldsn;
}

void shifted_sweep(std::vector<double>& d, std::vector<double>& e, int lo,
                   int hi, double shift, DenseMatrix* u, DenseMatrix* v) {
  double f = (std::fabs(d[lo]) - shift) * (sign_of(1.0, d[lo]) + shift / d[lo]);
  double g = e[lo];
  double cosr, sinr, cosl, sinl, r;
  for (int i = lo; i < hi; ++i) {
    rotg(f, g, cosr, sinr, r);
    if (i > lo) e[i - 1] = r;
    f = cosr * d[i] + sinr * e[i];
    e[i] = cosr * e[i] - sinr * d[i];
    g = sinr * d[i + 1];
    d[i + 1] = cosr * d[i + 1];
    rot_cols(v, i, i + 1, cosr, sinr);
    rotg(f, g, cosl, sinl, r);
    d[i] = r;
    f = cosl * e[i] + sinl * d[i + 1];
    d[i + 1] = cosl * d[i + 1] - sinl * e[i];
    if (i < hi - 1) {
      g = sinl * e[i + 1];
      e[i + 1] = cosl * e[i + 1];
    }
    rot_cols(u, i, i + 1, cosl, sinl);
  }
  e[hi - 1] = f;
}

// In-place SVD of the upper bidiagonal (d, e). On return d holds the
// singular values descending; u and v (optional) have their columns combined
// by the same rotations, then sign-fixed and permuted to match.
void svd_upper_bidiagonal_inplace(std::vector<double>& d,
                                  std::vector<double>& e, DenseMatrix* u,
                                  DenseMatrix* v) {
  const int q = static_cast<int>(d.size());
  const double tiny = std::numeric_limits<double>::min() / kEps;
  int hi = q - 1;
  const long long maxit = 30LL * q * q + 100;
  long long iter = 0;
  while (hi > 0) {
    for (int i = 0; i < hi; ++i) {
      if (std::fabs(e[i]) <= kEps * (std::fabs(d[i]) + std::fabs(d[i + 1])) ||
          std::fabs(e[i]) < tiny)
        e[i] = 0.0;
    }
    while (hi > 0 && e[hi - 1] == 0.0) --hi;
    if (hi == 0) break;
    int lo = hi - 1;
    while (lo > 0 && e[lo - 1] != 0.0) --lo;
    if (++iter > maxit)
      throw Error("bidiagonal svd: no convergence after " +
                  std::to_string(maxit) + " sweeps");
    if (hi - lo == 1) {
      double ssmin, ssmax, snr, csr, snl, csl;
      lasv2(d[lo], e[lo], d[lo + 1], ssmin, ssmax, snr, csr, snl, csl);
      d[lo] = ssmax;
      d[lo + 1] = ssmin;
      e[lo] = 0.0;
      rot_cols(v, lo, lo + 1, csr, snr);
      rot_cols(u, lo, lo + 1, csl, snl);
      continue;
    }
    const double sll = std::fabs(d[lo]);
    double shift, smax2;
    las2(d[hi - 1], e[hi - 1], d[hi], shift, smax2);
    shift = std::fabs(shift);
    if (sll > 0.0 && (shift / sll) * (shift / sll) < kEps) shift = 0.0;
    if (shift == 0.0 || d[lo] == 0.0)
      zero_shift_sweep(d, e, lo, hi, u, v);
    else
      shifted_sweep(d, e, lo, hi, shift, u, v);
  }
  for (int i = 0; i < q; ++i) {
    if (d[i] < 0.0) {
      d[i] = -d[i];
      if (v != nullptr) {
        double* c = v->col(i);
        for (int r = 0; r < v->nrows; ++r) c[r] = -c[r];
      }
    }
  }
  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return d[a] > d[b]; });
  std::vector<double> ds(q);
  for (int i = 0; i < q; ++i) ds[i] = d[order[i]];
  d = std::move(ds);
  const auto permute_cols = [&](DenseMatrix* m) {
    if (m == nullptr) return;
    DenseMatrix out(m->nrows, m->ncols);
    for (int j = 0; j < q; ++j)
      std::copy(m->col(order[j]), m->col(order[j]) + m->nrows, out.col(j));
    *m = std::move(out);
  };
  permute_cols(u);
  permute_cols(v);
}

struct UpperBidiagonal {
  std::vector<double> d, e;
};

// Reduces the (k+1) x k lower bidiagonal to square upper bidiagonal form by
// row rotations; `rots` receives the k rotations applied (for rebuilding the
// left singular vectors).
UpperBidiagonal lower_to_upper(const BidiagPair& coeffs, int k,
                               std::vector<std::pair<double, double>>* rots) {
  UpperBidiagonal ub;
  ub.d.resize(k);
  if (k > 1) ub.e.resize(k - 1);
  if (rots != nullptr) rots->resize(k);
  double cur = coeffs.alpha[0];
  for (int j = 0; j < k; ++j) {
    double c, s, r;
    rotg(cur, coeffs.beta[j + 1], c, s, r);
    if (rots != nullptr) (*rots)[j] = {c, s};
    ub.d[j] = r;
    if (j + 1 < k) {
      ub.e[j] = s * coeffs.alpha[j + 1];
      cur = c * coeffs.alpha[j + 1];
    }
  }
  return ub;
}

void check_side_b(const BidiagPair& coeffs, int k) {
  if (k < 1) throw InvalidInputError("svd_bidiagonal: k must be >= 1");
  if (k > static_cast<int>(coeffs.alpha.size()) ||
      k + 1 > static_cast<int>(coeffs.beta.size()))
    throw ShapeError("side b needs alpha_1..alpha_k and beta_1..beta_{k+1}, k = " +
                     std::to_string(k));
}

void check_side_bhat(const BidiagPair& coeffs, int k) {
  if (k < 1) throw InvalidInputError("svd_bidiagonal: k must be >= 1");
  if (k > static_cast<int>(coeffs.alpha_hat.size()) ||
      k - 1 > static_cast<int>(coeffs.beta_hat.size()))
    throw ShapeError(
        "side bhat needs alphahat_1..alphahat_k and betahat_1..betahat_{k-1}, k = " +
        std::to_string(k));
}

}  // namespace

RitzDecomposition svd_bidiagonal(const BidiagPair& coeffs, BidiagSide side,
                                 int k) {
  RitzDecomposition out;
  out.side = side;
  if (side == BidiagSide::b) {
    check_side_b(coeffs, k);
    std::vector<std::pair<double, double>> rots;
    UpperBidiagonal ub = lower_to_upper(coeffs, k, &rots);
    DenseMatrix u = DenseMatrix::identity(k);
    DenseMatrix v = DenseMatrix::identity(k);
    svd_upper_bidiagonal_inplace(ub.d, ub.e, &u, &v);
    // left vectors of B: undo the row rotations on [u; 0]
    DenseMatrix left(k + 1, k);
    for (int j = 0; j < k; ++j)
      std::copy(u.col(j), u.col(j) + k, left.col(j));
    for (int j = k - 1; j >= 0; --j) {
      const double c = rots[j].first, s = rots[j].second;
      for (int col = 0; col < k; ++col) {
        const double a = left(j, col);
        const double b = left(j + 1, col);
        left(j, col) = c * a - s * b;
        left(j + 1, col) = s * a + c * b;
      }
    }
    out.thetas = std::move(ub.d);
    out.left = std::move(left);
    out.right = std::move(v);
  } else {
    check_side_bhat(coeffs, k);
    std::vector<double> d(coeffs.alpha_hat.begin(), coeffs.alpha_hat.begin() + k);
    std::vector<double> e;
    if (k > 1) e.assign(coeffs.beta_hat.begin(), coeffs.beta_hat.begin() + k - 1);
    DenseMatrix u = DenseMatrix::identity(k);
    DenseMatrix v = DenseMatrix::identity(k);
    svd_upper_bidiagonal_inplace(d, e, &u, &v);
    out.thetas = std::move(d);
    out.left = std::move(u);
    out.right = std::move(v);
  }
  return out;
}

std::vector<double> bidiagonal_singular_values(const BidiagPair& coeffs,
                                               BidiagSide side, int k) {
  if (side == BidiagSide::b) {
    check_side_b(coeffs, k);
    UpperBidiagonal ub = lower_to_upper(coeffs, k, nullptr);
    svd_upper_bidiagonal_inplace(ub.d, ub.e, nullptr, nullptr);
    return std::move(ub.d);
  }
  check_side_bhat(coeffs, k);
  std::vector<double> d(coeffs.alpha_hat.begin(), coeffs.alpha_hat.begin() + k);
  std::vector<double> e;
  if (k > 1) e.assign(coeffs.beta_hat.begin(), coeffs.beta_hat.begin() + k - 1);
  svd_upper_bidiagonal_inplace(d, e, nullptr, nullptr);
  return d;
}

double inv_norm(const BidiagPair& coeffs, BidiagSide side, int k) {
  if (k < 1) throw InvalidInputError("inv_norm: k must be >= 1");
  std::vector<double> d, e;
  if (side == BidiagSide::b) {
    if (k > static_cast<int>(coeffs.alpha.size()) ||
        k > static_cast<int>(coeffs.beta.size()))
      throw ShapeError("inv_norm side b needs alpha_1..alpha_k, beta_2..beta_k");
    d.assign(coeffs.alpha.begin(), coeffs.alpha.begin() + k);
    if (k > 1) e.assign(coeffs.beta.begin() + 1, coeffs.beta.begin() + k);
  } else {
    check_side_bhat(coeffs, k);
    d.assign(coeffs.alpha_hat.begin(), coeffs.alpha_hat.begin() + k);
    if (k > 1) e.assign(coeffs.beta_hat.begin(), coeffs.beta_hat.begin() + k - 1);
  }
  svd_upper_bidiagonal_inplace(d, e, nullptr, nullptr);
  const double theta_min = d.back();
  if (theta_min == 0.0)
    throw SingularMatrixError("inv_norm: exactly singular bidiagonal");
  return 1.0 / theta_min;
}

}  // namespace jbd
