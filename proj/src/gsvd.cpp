#include "jbd/gsvd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jbd/errors.hpp"
#include "jbd/vecops.hpp"

namespace jbd {

namespace {

// Distance from x to the nearest entry of a descending-sorted list.
double nearest_distance(const std::vector<double>& sorted_desc, double x) {
  // lower_bound on descending order via reversed comparison
  auto it = std::lower_bound(sorted_desc.begin(), sorted_desc.end(), x,
                             [](double a, double b) { return a > b; });
  double best = std::numeric_limits<double>::infinity();
  if (it != sorted_desc.end()) best = std::min(best, std::fabs(*it - x));
  if (it != sorted_desc.begin()) best = std::min(best, std::fabs(*(it - 1) - x));
  return best;
}

double nearest_value(const std::vector<double>& sorted_desc, double x) {
  auto it = std::lower_bound(sorted_desc.begin(), sorted_desc.end(), x,
                             [](double a, double b) { return a > b; });
  double best = 0.0;
  double dist = std::numeric_limits<double>::infinity();
  if (it != sorted_desc.end()) {
    best = *it;
    dist = std::fabs(*it - x);
  }
  if (it != sorted_desc.begin() && std::fabs(*(it - 1) - x) < dist)
    best = *(it - 1);
  return best;
}

int count_within(const std::vector<double>& sorted_desc, double x, double tol) {
  int n = 0;
  for (double v : sorted_desc)
    if (std::fabs(v - x) <= tol) ++n;
  return n;
}

// Order-preserving continuation of each entry of `a` in the next list `b`
// (both descending). When `b` has one extra entry the newcomer opens a single
// gap, placed where total movement is smallest; equal lengths pair by index.
// Other shapes fall back to the nearest value.
std::vector<double> continuation_map(const std::vector<double>& a,
                                     const std::vector<double>& b) {
  const std::size_t n = a.size();
  std::vector<double> cont(n);
  if (b.size() == n + 1) {
    std::vector<double> pre(n + 1, 0.0), suf(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      pre[i + 1] = pre[i] + std::fabs(a[i] - b[i]);
    for (std::size_t i = n; i-- > 0;)
      suf[i] = suf[i + 1] + std::fabs(a[i] - b[i + 1]);
    std::size_t gap = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g <= n; ++g) {
      if (pre[g] + suf[g] < best) {
        best = pre[g] + suf[g];
        gap = g;
      }
    }
    for (std::size_t i = 0; i < n; ++i) cont[i] = i < gap ? b[i] : b[i + 1];
  } else if (b.size() == n) {
    for (std::size_t i = 0; i < n; ++i) cont[i] = b[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) cont[i] = nearest_value(b, a[i]);
  }
  return cont;
}

}  // namespace

GsvdApprox extract_gsvd(const JbdState& state, const RitzDecomposition& dec,
                        int index, const ProjectionProvider& provider,
                        LeftVectorRequest want) {
  const int k = dec.right.ncols;
  if (index < 0 || index >= k)
    throw InvalidInputError("extract_gsvd: index out of range");
  if (k > state.k)
    throw InvalidInputError(
        "extract_gsvd: decomposition uses more steps than the state has");

  GsvdApprox out;
  const double theta = dec.thetas[index];
  if (dec.side == BidiagSide::b) {
    out.c = theta;
    out.s = std::sqrt(std::max(0.0, 1.0 - theta * theta));
  } else {
    out.s = theta;
    out.c = std::sqrt(std::max(0.0, 1.0 - theta * theta));
  }

  // Combination coefficients of the vt columns. The bhat-side right vectors
  // live in the alternating-sign coordinates, so flip odd entries.
  std::vector<double> w(dec.right.col(index), dec.right.col(index) + k);
  if (dec.side == BidiagSide::bhat)
    for (int j = 1; j < k; j += 2) w[j] = -w[j];

  const int mp = state.m + state.p;
  std::vector<double> target(mp, 0.0);
  for (int j = 0; j < k; ++j)
    axpy(w[j], state.vt_basis.col_span(j), target);
  out.right_vector = provider.lstsq(target);

  if (dec.side == BidiagSide::b && want.a) {
    std::vector<double> y(state.m, 0.0);
    for (int j = 0; j < k + 1; ++j)
      axpy(dec.left(j, index), state.u_basis.col_span(j), y);
    out.left_vector_a = std::move(y);
  }
  if (dec.side == BidiagSide::bhat && want.l) {
    std::vector<double> y(state.p, 0.0);
    for (int j = 0; j < k; ++j)
      axpy(dec.left(j, index), state.uhat_basis.col_span(j), y);
    out.left_vector_l = std::move(y);
  }
  return out;
}

RitzTrace ritz_trace(const std::vector<std::vector<double>>& theta_history,
                     double ctol) {
  const int steps = static_cast<int>(theta_history.size());
  if (steps < 5)
    throw InsufficientHistoryError(
        "ritz_trace needs at least 5 steps, got " + std::to_string(steps));
  for (int k = 0; k < steps; ++k)
    if (theta_history[k].empty())
      throw InvalidInputError("ritz_trace: empty Ritz list at step " +
                              std::to_string(k + 1));

  RitzTrace trace;
  trace.thetas = theta_history;
  if (ctol <= 0.0) ctol = 1e-10 * theta_history.back().front();
  if (!(ctol > 0.0))
    throw InvalidInputError("ritz_trace: nonpositive convergence tolerance");
  trace.ctol = ctol;
  trace.last_flagged_step = steps - 3;

  trace.converged.resize(steps);
  for (int k = 0; k < steps; ++k)
    trace.converged[k].assign(theta_history[k].size(), 0);

  for (int k = 0; k + 3 < steps; ++k) {
    for (std::size_t i = 0; i < theta_history[k].size(); ++i) {
      const double th = theta_history[k][i];
      double dmin = std::numeric_limits<double>::infinity();
      for (int t = k + 1; t <= k + 3; ++t)
        dmin = std::min(dmin, nearest_distance(theta_history[t], th));
      trace.converged[k][i] = dmin <= ctol ? 1 : 0;
    }
  }

  // Distinct converged targets seen so far (cluster representatives).
  std::vector<double> targets;
  for (int k = 0; k + 3 < steps; ++k) {
    // fold this step's converged values into the target list
    for (std::size_t i = 0; i < theta_history[k].size(); ++i) {
      if (!trace.converged[k][i]) continue;
      const double th = theta_history[k][i];
      bool known = false;
      for (double tau : targets)
        if (std::fabs(tau - th) <= ctol) {
          known = true;
          break;
        }
      if (!known) targets.push_back(th);
    }

    const auto& cur = theta_history[k];
    const auto& nxt = theta_history[k + 1];

    // Targets that gain a copy across this transition.
    std::vector<double> gained;
    for (double tau : targets)
      if (count_within(nxt, tau, ctol) > count_within(cur, tau, ctol))
        gained.push_back(tau);
    if (gained.empty()) continue;

    const std::vector<double> cont = continuation_map(cur, nxt);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (!trace.converged[k][i]) continue;
      if (std::fabs(cont[i] - cur[i]) <= 100.0 * ctol) continue;
      // The value left its track while some other converged target gained a
      // copy in the same transition.
      bool distinct = false;
      for (double tau : gained)
        if (std::fabs(tau - cur[i]) > ctol) {
          distinct = true;
          break;
        }
      if (!distinct) continue;
      GhostEvent ev;
      ev.step = k + 2;  // 1-based step whose list drops the value
      ev.value = cur[i];
      ev.kind = cont[i] > cur[i] ? GhostEvent::Kind::jump_up
                                 : GhostEvent::Kind::jump_down;
      trace.ghosts.push_back(ev);
    }
  }
  return trace;
}

int converged_copies(const RitzTrace& trace, int step, double value,
                     double tol) {
  if (step < 1 || step > static_cast<int>(trace.thetas.size()))
    throw InvalidInputError("converged_copies: step out of range");
  const auto& vals = trace.thetas[step - 1];
  const auto& flags = trace.converged[step - 1];
  int n = 0;
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (flags[i] && std::fabs(vals[i] - value) <= tol) ++n;
  return n;
}

std::vector<SidePairing> pair_sides(std::span<const double> thetas_b,
                                    std::span<const double> thetas_bhat,
                                    double ambiguity_tol) {
  std::vector<SidePairing> out;
  std::vector<char> used(thetas_bhat.size(), 0);
  for (std::size_t i = 0; i < thetas_b.size(); ++i) {
    const double c2 = thetas_b[i] * thetas_b[i];
    int best = -1;
    double best_mis = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < thetas_bhat.size(); ++j) {
      if (used[j]) continue;
      const double mis = std::fabs(c2 + thetas_bhat[j] * thetas_bhat[j] - 1.0);
      if (mis < best_mis) {
        second = best_mis;
        best_mis = mis;
        best = static_cast<int>(j);
      } else if (mis < second) {
        second = mis;
      }
    }
    if (best < 0) break;  // no partners left
    used[best] = 1;
    SidePairing pr;
    pr.b_index = static_cast<int>(i);
    pr.bhat_index = best;
    pr.mismatch = best_mis;
    pr.ambiguous = (second - best_mis) <= ambiguity_tol;
    out.push_back(pr);
  }
  return out;
}

}  // namespace jbd
