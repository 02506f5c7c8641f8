#include "jbd/jbd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "jbd/errors.hpp"
#include "jbd/linalg.hpp"
#include "jbd/vecops.hpp"

namespace jbd {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

DenseMatrix BidiagPair::b_matrix(int k) const {
  if (k < 1 || k > static_cast<int>(alpha.size()) ||
      k + 1 > static_cast<int>(beta.size()))
    throw InvalidInputError("b_matrix: not enough coefficients for k = " +
                            std::to_string(k));
  DenseMatrix b(k + 1, k);
  for (int j = 0; j < k; ++j) {
    b(j, j) = alpha[j];
    b(j + 1, j) = beta[j + 1];
  }
  return b;
}

DenseMatrix BidiagPair::bhat_matrix(int k) const {
  if (k < 1 || k > static_cast<int>(alpha_hat.size()) ||
      k - 1 > static_cast<int>(beta_hat.size()))
    throw InvalidInputError("bhat_matrix: not enough coefficients for k = " +
                            std::to_string(k));
  DenseMatrix b(k, k);
  for (int j = 0; j < k; ++j) {
    b(j, j) = alpha_hat[j];
    if (j + 1 < k) b(j, j + 1) = beta_hat[j];
  }
  return b;
}

namespace {

StrategyConfig resolve_config(const StrategyConfig& in, int planned_steps,
                              int mp) {
  StrategyConfig cfg = in;
  if (cfg.eta == 0.0) cfg.eta = std::pow(kEps, 0.75);
  if (cfg.omega0 == 0.0) cfg.omega0 = std::sqrt(kEps / (2.0 * planned_steps + 1.0));
  if (cfg.err_scale == 0.0) cfg.err_scale = 1.3 * std::sqrt(static_cast<double>(mp));
  if (cfg.kind == StrategyKind::partial) {
    if (!(kEps < cfg.eta && cfg.eta < cfg.omega0 && cfg.omega0 < 1.0))
      throw InvalidInputError(
          "partial strategy requires eps < eta < omega0 < 1; got eta = " +
          std::to_string(cfg.eta) + ", omega0 = " + std::to_string(cfg.omega0));
  }
  if (cfg.eta <= 0.0 || cfg.omega0 <= 0.0 || cfg.err_scale <= 0.0)
    throw InvalidInputError("strategy thresholds must be positive");
  return cfg;
}

void project_embedded(const ProjectionProvider& provider,
                      std::span<const double> u, std::vector<double>& work,
                      std::vector<double>& out) {
  const int m = provider.m();
  const int mp = m + provider.p();
  work.assign(mp, 0.0);
  std::copy(u.begin(), u.end(), work.begin());
  out.resize(mp);
  provider.project(work, out);
}

// Pulls column j of a basis into a contiguous vector view.
std::span<const double> basis_col(const DenseMatrix& basis, int j) {
  return basis.col_span(j);
}

}  // namespace

JbdState jbd_init(const ProjectionProvider& provider,
                  std::span<const double> b, const StrategyConfig& config,
                  int planned_steps) {
  const int m = provider.m();
  const int p = provider.p();
  if (planned_steps < 1)
    throw InvalidInputError("planned_steps must be at least 1");
  if (static_cast<int>(b.size()) != m)
    throw ShapeError("starting vector has length " + std::to_string(b.size()) +
                     ", expected m = " + std::to_string(m));

  JbdState st;
  st.m = m;
  st.p = p;
  st.n = provider.n();
  st.planned_steps = planned_steps;
  st.config = resolve_config(config, planned_steps, m + p);
  st.u_basis = DenseMatrix(m, 0);
  st.vt_basis = DenseMatrix(m + p, 0);
  st.uhat_basis = DenseMatrix(p, 0);
  st.u_basis.reserve_cols(planned_steps + 1);
  st.vt_basis.reserve_cols(planned_steps + 1);
  st.uhat_basis.reserve_cols(planned_steps + 1);

  const double beta1 = nrm2(b);
  if (beta1 == 0.0)
    throw InvalidInputError("starting vector must be nonzero");
  std::vector<double> u1(b.begin(), b.end());
  scal(1.0 / beta1, u1);
  st.u_basis.append_col(u1);
  st.coeffs.beta.push_back(beta1);

  std::vector<double> work, vt1;
  project_embedded(provider, u1, work, vt1);
  const double alpha1 = nrm2(vt1);
  st.breakdown_threshold = (m + p) * kEps * std::max(alpha1, beta1);
  st.tracker = make_tracker(st.config.omega0, st.config.eta,
                            st.config.err_scale, st.config.seed);
  if (alpha1 < st.breakdown_threshold) {
    st.breakdown = BreakdownInfo{0, "alpha", alpha1};
    return st;
  }
  scal(1.0 / alpha1, vt1);
  st.vt_basis.append_col(vt1);
  st.coeffs.alpha.push_back(alpha1);

  std::vector<double> uhat1(vt1.begin() + m, vt1.end());
  const double alphahat1 = nrm2(uhat1);
  if (alphahat1 < st.breakdown_threshold) {
    st.breakdown = BreakdownInfo{0, "alpha_hat", alphahat1};
    return st;
  }
  scal(1.0 / alphahat1, uhat1);
  st.uhat_basis.append_col(uhat1);
  st.coeffs.alpha_hat.push_back(alphahat1);
  return st;
}

StepResult jbd_step(JbdState& state, const ProjectionProvider& provider) {
  if (state.breakdown)
    throw Error("jbd_step called after breakdown at step " +
                std::to_string(state.breakdown->step));
  const int i = state.k + 1;  // 1-based index of the step being taken
  const int m = state.m;
  const int mp = state.m + state.p;
  const StrategyKind kind = state.config.kind;
  StepReorth rec;

  // (a) strip the top block of vt_i and remove the u_i component
  const double alpha_i = state.coeffs.alpha[i - 1];
  std::span<const double> vt_i = basis_col(state.vt_basis, i - 1);
  std::span<const double> u_i = basis_col(state.u_basis, i - 1);
  std::vector<double> r(m);
  for (int row = 0; row < m; ++row) r[row] = vt_i[row] - alpha_i * u_i[row];

  double beta_next = nrm2(r);
  if (beta_next < state.breakdown_threshold) {
    state.breakdown = BreakdownInfo{i, "beta", beta_next};
    return StepResult::breakdown;
  }

  // (b) estimate the new row of u-orthogonality levels, then clean up
  update_mu(state.tracker, state.coeffs.alpha, state.coeffs.beta, beta_next);
  std::vector<int> t_set;
  if (kind == StrategyKind::full) {
    t_set.resize(i - 1);
    std::iota(t_set.begin(), t_set.end(), 0);
  } else if (kind == StrategyKind::partial) {
    const std::vector<double> levels(state.tracker.mu_curr.begin(),
                                     state.tracker.mu_curr.begin() + (i - 1));
    std::vector<int> sel =
        select_indices(levels, state.config.omega0, state.config.eta);
    if (state.force_u) {
      std::vector<int> merged(state.forced_t);
      merged.insert(merged.end(), sel.begin(), sel.end());
      std::sort(merged.begin(), merged.end());
      merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
      t_set = std::move(merged);
      state.force_u = !sel.empty();
    } else {
      t_set = sel;
      state.force_u = !t_set.empty();
    }
    if (state.force_u) {
      state.forced_t = t_set;
      state.forced_t.push_back(i - 1);  // include this step's own u vector
    } else {
      state.forced_t.clear();
    }
  }
  if (!t_set.empty()) {
    ReorthResult rr = reorthogonalize(r, state.u_basis, t_set);
    r = std::move(rr.vec);
    rec.t_set = t_set;
    rec.t_coeffs = std::move(rr.coefficients);
    state.reorth.ops_u += static_cast<long long>(t_set.size()) * rr.passes;
    reset_entries(state.tracker, state.tracker.mu_curr, t_set);
    beta_next = nrm2(r);
    if (beta_next < state.breakdown_threshold) {
      state.breakdown = BreakdownInfo{i, "beta", beta_next};
      return StepResult::breakdown;
    }
  }

  // (c) accept u_{i+1}
  scal(1.0 / beta_next, r);

  // (d) project the embedded new vector and remove the vt_i component
  std::vector<double> work, s;
  project_embedded(provider, r, work, s);
  for (int row = 0; row < mp; ++row) s[row] -= beta_next * vt_i[row];

  double alpha_next = nrm2(s);
  if (alpha_next < state.breakdown_threshold) {
    state.breakdown = BreakdownInfo{i, "alpha", alpha_next};
    return StepResult::breakdown;
  }

  // (e) vt-side estimates and cleanup, mirroring (b)
  {
    std::vector<double> beta_ext = state.coeffs.beta;
    beta_ext.push_back(beta_next);
    update_nu(state.tracker, state.coeffs.alpha, beta_ext, alpha_next);
  }
  std::vector<int> s_set;
  if (kind == StrategyKind::full) {
    s_set.resize(i - 1);
    std::iota(s_set.begin(), s_set.end(), 0);
  } else if (kind == StrategyKind::partial) {
    const std::vector<double> levels(state.tracker.nu_curr.begin(),
                                     state.tracker.nu_curr.begin() + (i - 1));
    std::vector<int> sel =
        select_indices(levels, state.config.omega0, state.config.eta);
    if (state.force_v) {
      std::vector<int> merged(state.forced_s);
      merged.insert(merged.end(), sel.begin(), sel.end());
      std::sort(merged.begin(), merged.end());
      merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
      s_set = std::move(merged);
      state.force_v = !sel.empty();
    } else {
      s_set = sel;
      state.force_v = !s_set.empty();
    }
    if (state.force_v) {
      state.forced_s = s_set;
      state.forced_s.push_back(i - 1);
    } else {
      state.forced_s.clear();
    }
  }
  if (!s_set.empty()) {
    ReorthResult rr = reorthogonalize(s, state.vt_basis, s_set);
    s = std::move(rr.vec);
    rec.s_set = s_set;
    rec.s_coeffs = std::move(rr.coefficients);
    state.reorth.ops_v += static_cast<long long>(s_set.size()) * rr.passes;
    reset_entries(state.tracker, state.tracker.nu_curr, s_set);
    alpha_next = nrm2(s);
    if (alpha_next < state.breakdown_threshold) {
      state.breakdown = BreakdownInfo{i, "alpha", alpha_next};
      return StepResult::breakdown;
    }
  }

  // (f) accept vt_{i+1}
  scal(1.0 / alpha_next, s);

  // (g) the upper-bidiagonal coupling coefficient comes from the identity
  // alphahat_i betahat_i = alpha_{i+1} beta_{i+1}, never from orthogonalizing
  const double alphahat_i = state.coeffs.alpha_hat[i - 1];
  const double betahat_i = alpha_next * beta_next / alphahat_i;

  // (h) continue the uhat sequence from the bottom block of vt_{i+1},
  // with the alternating sign that keeps its coefficients positive
  const double sign = (i % 2 == 0) ? 1.0 : -1.0;
  std::span<const double> uhat_i = basis_col(state.uhat_basis, i - 1);
  std::vector<double> w(state.p);
  for (int row = 0; row < state.p; ++row)
    w[row] = sign * s[m + row] - betahat_i * uhat_i[row];
  if (kind == StrategyKind::full && state.config.uhat_reorth && i >= 2) {
    std::vector<int> h_set(i - 1);
    std::iota(h_set.begin(), h_set.end(), 0);
    ReorthResult rr = reorthogonalize(w, state.uhat_basis, h_set);
    w = std::move(rr.vec);
    rec.uhat_set = h_set;
    rec.uhat_coeffs = std::move(rr.coefficients);
    state.reorth.ops_uhat += static_cast<long long>(h_set.size()) * rr.passes;
  }

  // (i) accept uhat_{i+1}
  const double alphahat_next = nrm2(w);
  if (alphahat_next < state.breakdown_threshold) {
    state.breakdown = BreakdownInfo{i, "alpha_hat", alphahat_next};
    return StepResult::breakdown;
  }
  scal(1.0 / alphahat_next, w);

  state.u_basis.append_col(r);
  state.vt_basis.append_col(s);
  state.uhat_basis.append_col(w);
  state.coeffs.beta.push_back(beta_next);
  state.coeffs.alpha.push_back(alpha_next);
  state.coeffs.beta_hat.push_back(betahat_i);
  state.coeffs.alpha_hat.push_back(alphahat_next);
  state.reorth.steps.push_back(std::move(rec));
  state.k = i;
  return StepResult::ok;
}

JbdState jbd_run(const ProjectionProvider& provider, std::span<const double> b,
                 int steps, const StrategyConfig& config) {
  if (steps < 1)
    throw InvalidInputError("steps must be at least 1, got " +
                            std::to_string(steps));
  JbdState st = jbd_init(provider, b, config, steps);
  for (int i = 0; i < steps && !st.breakdown; ++i) jbd_step(st, provider);
  return st;
}

}  // namespace jbd
