// Turns the bidiagonal SVDs into approximate generalized singular pairs of
// {A, L}, follows Ritz values across steps, and flags ghost duplicates.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "jbd/bidiag_svd.hpp"
#include "jbd/jbd.hpp"
#include "jbd/projector.hpp"

namespace jbd {

struct GsvdApprox {
  double c = 0.0;
  double s = 0.0;
  std::vector<double> right_vector;                 // length n
  std::optional<std::vector<double>> left_vector_a; // length m, side b only
  std::optional<std::vector<double>> left_vector_l; // length p, side bhat only
};

struct LeftVectorRequest {
  bool a = false;
  bool l = false;
};

// Approximate generalized singular pair number `index` (0-based, by
// descending theta) from a decomposition of this run's coefficients.
// Side b reads c = theta and derives s; side bhat reads s = theta.
// The right vector solves min ||[A; L] x - Vt_k w|| through the provider;
// for side bhat the combination coefficients w get the alternating signs
// that relate the two right-vector families.
// Left vectors are filled only for the side that produces them.
GsvdApprox extract_gsvd(const JbdState& state, const RitzDecomposition& dec,
                        int index, const ProjectionProvider& provider,
                        LeftVectorRequest want = {});

struct GhostEvent {
  enum class Kind : std::uint8_t { jump_up, jump_down };
  int step = 0;  // 1-based step whose list no longer continues the value
  double value = 0.0;
  Kind kind = Kind::jump_up;
};

struct RitzTrace {
  std::vector<std::vector<double>> thetas;   // per step, descending
  std::vector<std::vector<char>> converged;  // flags aligned with thetas
  std::vector<GhostEvent> ghosts;
  double ctol = 0.0;
  int last_flagged_step = 0;  // 1-based; later steps have no flags
};

// Follows Ritz values across steps 1..K of one run. A value converges at
// step k when within the next three steps some list comes back within ctol
// of it; a ghost event is a converged value whose continuation at the next
// step is farther than 100*ctol away while some other, distinct converged
// target gains a copy. ctol = 0 picks 1e-10 times the final largest theta.
// Throws InsufficientHistoryError when fewer than 5 steps are given.
RitzTrace ritz_trace(const std::vector<std::vector<double>>& theta_history,
                     double ctol = 0.0);

// Number of values flagged converged at `step` (1-based) lying within tol
// of `value`.
int converged_copies(const RitzTrace& trace, int step, double value,
                     double tol);

struct SidePairing {
  int b_index = 0;
  int bhat_index = 0;
  double mismatch = 0.0;  // |c^2 + s^2 - 1|
  bool ambiguous = false;
};

// Pairs side-b values (c) with side-bhat values (s) by greedily matching
// c^2 + s^2 to 1; a pairing is ambiguous when a different unused partner
// comes within ambiguity_tol of the best mismatch.
std::vector<SidePairing> pair_sides(std::span<const double> thetas_b,
                                    std::span<const double> thetas_bhat,
                                    double ambiguity_tol = 1e-8);

}  // namespace jbd
