#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jbd/matrix.hpp"

namespace jbd {

/// Ground truth attached to a generated pair: generalized singular values
/// sorted nonincreasing, the matching sines, the right vectors (one column per
/// value), and the multiplicity of the group each value belongs to.
struct KnownGsvd {
  std::vector<double> c;
  std::vector<double> s;
  DenseMatrix right_vectors;
  std::vector<int> multiplicities;
};

struct GeneratedPair {
  CsrMatrix a;
  CsrMatrix l;
  KnownGsvd truth;
};

/// Square pair {A, L} = {C D, S D} where C = diag(c), S = diag(sqrt(1 - c^2))
/// and D is a symmetric orthogonal matrix. With seed 0, D is the sine-transform
/// matrix with entries sqrt(2/(n+1)) * sin(i*j*pi/(n+1)); any other seed
/// produces a pseudo-random symmetric orthogonal D deterministically.
/// Values of c must lie strictly inside (0, 1); they are sorted nonincreasing
/// and the truth columns follow that order.
GeneratedPair make_cs_pair(int n, std::span<const double> c, std::uint64_t seed = 0);

/// The 800 x 800 pair with clustered and multiple generalized singular values:
/// c = 0.90, 0.86, 0.86, 0.82, 0.78, then 790 values evenly spaced from 0.80
/// down to 0.30, then 0.22, 0.20, 0.15, 0.15, 0.10.
GeneratedPair make_multiplicity_pair(std::uint64_t seed = 0);

/// First-difference matrix: (n-1) x n, rows (..., 1, -1, ...).
CsrMatrix make_first_derivative(int n);

}  // namespace jbd
