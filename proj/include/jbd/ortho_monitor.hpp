// Running estimates of orthogonality loss in the two Lanczos-type bases
// produced by the joint bidiagonalization recurrence.
//
// mu[j] estimates |u_{i+1}^T u_j|, nu[j] estimates |vt_{i+1}^T vt_j|.
// Both are carried forward one step at a time from the recurrence
// coefficients alone, so maintaining them costs O(i) per step instead of
// the O((m+p) i) cost of measuring the inner products directly.
//
// The estimates are stored as magnitudes. When a reorthogonalization pass
// cleans up a set of indices, the corresponding entries are reset to a
// small deterministic noise value just above machine epsilon rather than
// zero, so later growth resumes from a realistic base.
#pragma once

#include <cstdint>
#include <vector>

namespace jbd {

struct OrthoTracker {
  // Row i of the estimates: mu_curr[j] ~ |u_i^T u_j| for j = 0..i-1,
  // mu_curr[i] = 1. Same layout for nu_curr against the vt basis.
  std::vector<double> mu_prev, mu_curr;
  std::vector<double> nu_prev, nu_curr;

  double omega0 = 0.0;     // selection trigger level
  double eta = 0.0;        // neighborhood inclusion level
  double err_scale = 1.0;  // multiplier on the epsilon bias terms
  std::uint64_t noise_seed = 0;
  std::uint64_t noise_counter = 0;

  int size() const { return static_cast<int>(mu_curr.size()); }
};

// Starts a tracker at step 1 (bases {u_1} and {vt_1}).
OrthoTracker make_tracker(double omega0, double eta, double err_scale,
                          std::uint64_t noise_seed);

// Advances mu from row i to row i+1 given the recurrence coefficients.
// alpha, beta index from step 1: alpha[j] = alpha_{j+1}, beta[j] = beta_{j+1}
// (so beta[0] is the starting normalization). beta_next = beta_{i+2} must be
// the provisional normalization of the new u vector, taken before any
// reorthogonalization touches it. After the call mu_curr has i+2 entries.
void update_mu(OrthoTracker& t, const std::vector<double>& alpha,
               const std::vector<double>& beta, double beta_next);

// Advances nu to row i+1; requires update_mu for the same step first.
// alpha_next = alpha_{i+2} is the provisional normalization of the new vt.
void update_nu(OrthoTracker& t, const std::vector<double>& alpha,
               const std::vector<double>& beta, double alpha_next);

// Applies the neighbor-expansion rule to an estimate row: take every
// maximal contiguous run of entries above eta that contains at least one
// entry above omega0. Returns 0-based indices, ascending. Entries above
// eta that sit in a run with no omega0 crossing are left alone.
std::vector<int> select_indices(const std::vector<double>& levels,
                                double omega0, double eta);

// Resets estimate entries after those basis vectors were reorthogonalized.
// Each entry gets a fresh deterministic value in [0.75 eps, 1.5 eps).
void reset_entries(OrthoTracker& t, std::vector<double>& row,
                   const std::vector<int>& indices);

}  // namespace jbd
