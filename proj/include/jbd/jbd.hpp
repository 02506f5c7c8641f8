// Joint bidiagonalization of a stacked pair {A, L}.
//
// Starting from b, the process builds three one-column-at-a-time bases
//   U   (length-m vectors),
//   Vt  (length m+p, columns of the projected Krylov space),
//   Uhat (length-p vectors),
// together with coefficient sequences alpha, beta, alpha_hat, beta_hat that
// form a lower bidiagonal matrix B_k and an upper bidiagonal matrix Bhat_k.
// The generalized singular values of {A, L} are approximated by the SVDs of
// those small matrices (see gsvd.hpp).
//
// In floating point the bases lose orthogonality; the strategy config picks
// what to do about it: nothing, full reorthogonalization each step, or
// partial reorthogonalization driven by the ortho_monitor estimates.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jbd/matrix.hpp"
#include "jbd/ortho_monitor.hpp"
#include "jbd/projector.hpp"

namespace jbd {

enum class StrategyKind : std::uint8_t { none, full, partial };

struct StrategyConfig {
  StrategyKind kind = StrategyKind::partial;
  // Zero means "use the default": eta = eps^(3/4),
  // omega0 = sqrt(eps / (2 * planned_steps + 1)),
  // err_scale = 1.3 * sqrt(m + p).
  double eta = 0.0;
  double omega0 = 0.0;
  double err_scale = 0.0;
  bool uhat_reorth = true;  // full strategy only; partial never touches uhat
  std::uint64_t seed = 0;   // seed for the tracker's reset noise
};

struct BidiagPair {
  std::vector<double> alpha;      // alpha_1 .. alpha_{k+1}
  std::vector<double> beta;       // beta_1 .. beta_{k+1}; beta[0] = ||b||
  std::vector<double> alpha_hat;  // alphahat_1 .. alphahat_{k+1}
  std::vector<double> beta_hat;   // betahat_1 .. betahat_k

  // (k+1) x k lower bidiagonal: diag alpha_1..alpha_k, subdiag beta_2..beta_{k+1}.
  DenseMatrix b_matrix(int k) const;
  // k x k upper bidiagonal: diag alphahat_1..alphahat_k, superdiag betahat_1...
  DenseMatrix bhat_matrix(int k) const;
};

struct StepReorth {
  std::vector<int> t_set;  // u-side indices reorthogonalized against (0-based)
  std::vector<int> s_set;  // vt-side
  std::vector<int> uhat_set;
  std::vector<double> t_coeffs;  // aligned with the sets
  std::vector<double> s_coeffs;
  std::vector<double> uhat_coeffs;
};

struct ReorthRecord {
  std::vector<StepReorth> steps;  // steps[i-1] describes process step i
  // Cumulative single-vector orthogonalization counts (passes included).
  long long ops_u = 0;
  long long ops_v = 0;
  long long ops_uhat = 0;
};

struct BreakdownInfo {
  int step = 0;             // 0 = during initialization
  std::string coefficient;  // "alpha", "beta", or "alpha_hat"
  double value = 0.0;
};

enum class StepResult : std::uint8_t { ok, breakdown };

struct JbdState {
  int k = 0;  // completed steps
  int m = 0, p = 0, n = 0;
  int planned_steps = 0;

  DenseMatrix u_basis;     // m x (k+1)
  DenseMatrix vt_basis;    // (m+p) x (k+1)
  DenseMatrix uhat_basis;  // p x (k+1)

  BidiagPair coeffs;
  ReorthRecord reorth;
  StrategyConfig config;  // with defaults resolved to concrete values
  OrthoTracker tracker;   // maintained under every strategy

  double breakdown_threshold = 0.0;  // (m+p) * eps * max(alpha_1, beta_1)
  std::optional<BreakdownInfo> breakdown;

  // Pending forced-continuation sets: once a step reorthogonalizes, the next
  // step must reorthogonalize against the same set plus the step's own vector,
  // otherwise the estimate recurrences restart from an invalid state.
  bool force_u = false, force_v = false;
  std::vector<int> forced_t, forced_s;
};

// Normalizes b, projects to seed the vt and uhat bases, resolves config
// defaults (planned_steps feeds the omega0 default). State is at k = 0.
// Throws InvalidInputError on zero b, ShapeError on a length mismatch.
// A negligible alpha_1 or alphahat_1 sets state.breakdown instead of throwing.
JbdState jbd_init(const ProjectionProvider& provider,
                  std::span<const double> b, const StrategyConfig& config,
                  int planned_steps);

// Runs one process step. Returns StepResult::breakdown (and records the
// details in state.breakdown) when a coefficient falls below the threshold;
// the state then stays at the last completed step. Throws Error if called
// again after a breakdown.
StepResult jbd_step(JbdState& state, const ProjectionProvider& provider);

// jbd_init + `steps` jbd_step calls, stopping early on breakdown.
JbdState jbd_run(const ProjectionProvider& provider, std::span<const double> b,
                 int steps, const StrategyConfig& config);

}  // namespace jbd
