#include <cmath>
#include <vector>

#include "doctest.h"
#include "jbd/errors.hpp"
#include "jbd/linalg.hpp"
#include "jbd/matrix.hpp"
#include "jbd/rng.hpp"
#include "support/oracles.hpp"

using namespace jbd;
using test::dotv;
using test::max_abs_diff;
using test::orthonormality_defect;

namespace {

constexpr double kEps = 2.220446049250313e-16;

DenseMatrix random_matrix(int rows, int cols, std::uint64_t seed) {
  DenseMatrix a(rows, cols);
  std::uint64_t ctr = 0;
  for (double& v : a.values) v = 2.0 * unit_uniform(seed, ctr++) - 1.0;
  return a;
}

}  // namespace

TEST_CASE("householder_qr reproduces the identity") {
  DenseMatrix a = DenseMatrix::identity(5);
  QrFactors f = householder_qr(a);
  CHECK(max_abs_diff(f.q, DenseMatrix::identity(5)) <= 10 * kEps);
  CHECK(max_abs_diff(f.r, DenseMatrix::identity(5)) <= 10 * kEps);
}

TEST_CASE("householder_qr factors a random tall matrix") {
  const int m = 40, n = 12;
  DenseMatrix a = random_matrix(m, n, 7);
  QrFactors f = householder_qr(a);

  CHECK(f.q.nrows == m);
  CHECK(f.q.ncols == n);
  CHECK(f.r.nrows == n);
  CHECK(f.r.ncols == n);
  CHECK(orthonormality_defect(f.q) <= 50 * n * kEps);
  CHECK(max_abs_diff(matmul(f.q, f.r), a) <= 1e-13);
  for (int j = 0; j < n; ++j) {
    CHECK(f.r(j, j) >= 0.0);
    for (int i = j + 1; i < n; ++i) CHECK(f.r(i, j) == 0.0);
  }
}

TEST_CASE("householder_qr flags a dependent column") {
  DenseMatrix a(6, 3);
  for (int i = 0; i < 6; ++i) {
    a(i, 0) = i + 1.0;
    a(i, 1) = 2.0 * (i + 1.0);  // multiple of column 0
    a(i, 2) = (i % 2) ? 1.0 : -1.0;
  }
  try {
    householder_qr(a);
    FAIL("expected RankDeficientError");
  } catch (const RankDeficientError& e) {
    CHECK(e.column() == 1);
  }
}

TEST_CASE("mgs_orthogonalize removes selected components") {
  DenseMatrix basis = householder_qr(random_matrix(30, 6, 3)).q;
  std::vector<double> x(30);
  for (int i = 0; i < 30; ++i) x[i] = unit_uniform(11, i);
  const std::vector<int> idx{0, 2, 5};
  auto [y, coeffs] = mgs_orthogonalize(x, basis, idx);
  REQUIRE(coeffs.size() == idx.size());
  for (int j : idx)
    CHECK(std::fabs(dotv(y, basis.col_span(j))) <= 100 * kEps);
  // untouched direction keeps its component
  CHECK(std::fabs(dotv(y, basis.col_span(1)) - dotv(x, basis.col_span(1))) <=
        100 * kEps);
}

TEST_CASE("reorthogonalize takes a second pass only when needed") {
  DenseMatrix basis = householder_qr(random_matrix(25, 5, 9)).q;
  std::vector<double> x(25);
  for (int i = 0; i < 25; ++i) x[i] = unit_uniform(13, i) - 0.5;
  const std::vector<int> idx{0, 1, 2, 3, 4};
  ReorthResult r = reorthogonalize(x, basis, idx);
  CHECK(r.passes >= 1);
  CHECK(r.passes <= 2);
  for (int j : idx)
    CHECK(std::fabs(dotv(r.vec, basis.col_span(j))) <= 100 * kEps);
}

TEST_CASE("dense_svd_oracle recovers a planted spectrum") {
  // A = Q1 diag(sigma) Q2^T with orthogonal factors from QR.
  const int n = 8;
  DenseMatrix q1 = householder_qr(random_matrix(n, n, 21)).q;
  DenseMatrix q2 = householder_qr(random_matrix(n, n, 22)).q;
  std::vector<double> sigma{9.0, 5.5, 3.0, 1.0, 0.5, 0.25, 1e-3, 1e-6};
  DenseMatrix mid(n, n);
  for (int i = 0; i < n; ++i) mid(i, i) = sigma[i];
  DenseMatrix a = matmul(matmul(q1, mid), [&] {
    DenseMatrix t(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t(i, j) = q2(j, i);
    return t;
  }());

  SvdResult s = dense_svd_oracle(a);
  REQUIRE(s.sigma.size() == static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    CHECK(std::fabs(s.sigma[i] - sigma[i]) <= 1e-13 * sigma[0]);
  CHECK(orthonormality_defect(s.u) <= 1e-13);
  CHECK(orthonormality_defect(s.v) <= 1e-13);

  // reconstruction
  DenseMatrix usv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int t = 0; t < n; ++t) acc += s.u(i, t) * s.sigma[t] * s.v(j, t);
      usv(i, j) = acc;
    }
  CHECK(max_abs_diff(usv, a) <= 1e-12);
}

TEST_CASE("spectral norms agree with the SVD oracle") {
  DenseMatrix a = random_matrix(14, 9, 33);
  SvdResult s = dense_svd_oracle(a);
  CHECK(spectral_norm(a) == doctest::Approx(s.sigma[0]).epsilon(1e-11));

  DenseMatrix g = gram(a);  // symmetric PSD
  CHECK(sym_spectral_norm(g) ==
        doctest::Approx(s.sigma[0] * s.sigma[0]).epsilon(1e-11));
}

TEST_CASE("tridiagonal extreme eigenvalues match a known matrix") {
  // Toeplitz(-1, 2, -1) of size n: eigenvalues 2 - 2 cos(j pi / (n+1)).
  const int n = 12;
  std::vector<double> d(n, 2.0), e(n - 1, -1.0);
  const double pi = 3.14159265358979323846;
  const double lmax = 2.0 - 2.0 * std::cos(n * pi / (n + 1));
  const double lmin = 2.0 - 2.0 * std::cos(pi / (n + 1));
  CHECK(tridiag_eig_largest(d, e) == doctest::Approx(lmax).epsilon(1e-12));
  CHECK(tridiag_eig_smallest(d, e) == doctest::Approx(lmin).epsilon(1e-12));
}

TEST_CASE("back_substitute solves and flags singular pivots") {
  DenseMatrix r(3, 3);
  r(0, 0) = 2.0; r(0, 1) = 1.0; r(0, 2) = -1.0;
  r(1, 1) = 4.0; r(1, 2) = 0.5;
  r(2, 2) = 8.0;
  std::vector<double> x{1.0, -2.0, 3.0};
  std::vector<double> rhs(3, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) rhs[i] += r(i, j) * x[j];
  std::vector<double> got = back_substitute(r, rhs);
  for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-14));

  r(1, 1) = 0.0;
  CHECK_THROWS_AS(back_substitute(r, rhs), SingularMatrixError);
}
