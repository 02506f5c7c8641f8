#include "jbd/testgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jbd/errors.hpp"
#include "jbd/linalg.hpp"
#include "jbd/rng.hpp"

namespace jbd {
namespace {

DenseMatrix sine_transform_matrix(int n) {
  DenseMatrix d(n, n);
  const double scale = std::sqrt(2.0 / (n + 1));
  const double pi = 3.14159265358979323846;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      d(i, j) = scale * std::sin((i + 1) * (j + 1) * pi / (n + 1));
  return d;
}

// Pseudo-random symmetric orthogonal matrix: Q * diag(+-1) * Q^T with Q from
// the QR of a seeded Gaussian-ish matrix.
DenseMatrix seeded_involution(int n, std::uint64_t seed) {
  DenseMatrix g(n, n);
  std::uint64_t counter = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      // Sum of three uniforms, centered; light-tailed enough for a QR basis.
      const double u =
          unit_uniform(seed, counter) + unit_uniform(seed, counter + 1) +
          unit_uniform(seed, counter + 2) - 1.5;
      counter += 3;
      g(i, j) = u;
    }
  const DenseMatrix q = householder_qr(g).q;
  std::vector<double> signs(n);
  for (int i = 0; i < n; ++i)
    signs[i] = unit_uniform(seed ^ 0x5357ab1e2fd7c981ULL, i) < 0.5 ? -1.0 : 1.0;
  DenseMatrix d(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int t = 0; t < n; ++t) acc += q(i, t) * signs[t] * q(j, t);
      d(i, j) = acc;
    }
  return d;
}

GeneratedPair build_pair(int n, std::vector<double> c, std::uint64_t seed) {
  for (double v : c)
    if (!(v > 0.0 && v < 1.0))
      throw InvalidInputError("cs pair: every value must lie strictly inside (0, 1)");
  std::sort(c.begin(), c.end(), std::greater<>());

  const DenseMatrix d = seed == 0 ? sine_transform_matrix(n) : seeded_involution(n, seed);

  GeneratedPair out;
  out.truth.c = c;
  out.truth.s.resize(n);
  for (int i = 0; i < n; ++i) out.truth.s[i] = std::sqrt(1.0 - c[i] * c[i]);
  out.truth.right_vectors = d;  // D is symmetric orthogonal, so columns serve directly
  out.truth.multiplicities.resize(n);
  for (int i = 0; i < n; ++i) {
    int count = 0;
    for (int j = 0; j < n; ++j)
      if (c[j] == c[i]) ++count;
    out.truth.multiplicities[i] = count;
  }

  DenseMatrix a(n, n), l(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      a(i, j) = c[i] * d(i, j);
      l(i, j) = out.truth.s[i] * d(i, j);
    }
  out.a = to_csr(a);
  out.l = to_csr(l);
  return out;
}

}  // namespace

GeneratedPair make_cs_pair(int n, std::span<const double> c, std::uint64_t seed) {
  if (n < 1) throw InvalidInputError("make_cs_pair: n must be positive");
  if (static_cast<int>(c.size()) != n)
    throw InvalidInputError("make_cs_pair: need exactly n values");
  return build_pair(n, std::vector<double>(c.begin(), c.end()), seed);
}

GeneratedPair make_multiplicity_pair(std::uint64_t seed) {
  const int n = 800;
  std::vector<double> c(n);
  c[0] = 0.90;
  c[1] = 0.86;
  c[2] = 0.86;
  c[3] = 0.82;
  c[4] = 0.78;
  // 790 evenly spaced values with exact endpoints 0.80 and 0.30.
  for (int j = 0; j < 790; ++j) c[5 + j] = (0.80 * (789 - j) + 0.30 * j) / 789.0;
  c[795] = 0.22;
  c[796] = 0.20;
  c[797] = 0.15;
  c[798] = 0.15;
  c[799] = 0.10;
  return build_pair(n, std::move(c), seed);
}

CsrMatrix make_first_derivative(int n) {
  if (n < 2) throw InvalidInputError("make_first_derivative: n must be at least 2");
  CsrMatrix out;
  out.nrows = n - 1;
  out.ncols = n;
  out.row_offsets.resize(n);
  for (int i = 0; i < n - 1; ++i) {
    out.row_offsets[i] = 2 * i;
    out.col_indices.push_back(i);
    out.values.push_back(1.0);
    out.col_indices.push_back(i + 1);
    out.values.push_back(-1.0);
  }
  out.row_offsets[n - 1] = 2 * (n - 1);
  out.validate();
  return out;
}

}  // namespace jbd
