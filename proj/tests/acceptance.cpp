// End-to-end acceptance suite. Each numbered criterion prints exactly one
// PASS/FAIL line with the measured quantities; the process exits nonzero if
// any criterion fails. Tolerances are pinned here, not configurable.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "jbd/bidiag_svd.hpp"
#include "jbd/diagnostics.hpp"
#include "jbd/errors.hpp"
#include "jbd/gsvd.hpp"
#include "jbd/jbd.hpp"
#include "jbd/projector.hpp"
#include "jbd/rng.hpp"
#include "jbd/testgen.hpp"
#include "support/oracles.hpp"

using namespace jbd;

namespace {

constexpr double kEps = 2.220446049250313e-16;

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool g_all_ok = true;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s — %s\n", id, ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) g_all_ok = false;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> cs800_profile() {
  std::vector<double> c(800);
  for (int j = 0; j < 800; ++j) c[j] = (1200.0 - j) / 1600.0;
  return c;
}

struct DiagRun {
  JbdState state;
  std::vector<DiagnosticsRow> rows;
};

DiagRun run_with_diagnostics(const ProjectionProvider& prov,
                             const std::vector<double>& b, int steps,
                             StrategyKind kind) {
  StrategyConfig cfg;
  cfg.kind = kind;
  DiagnosticsCollector coll(prov, DiagnosticsOptions{});
  JbdState st = jbd_init(prov, b, cfg, steps);
  for (int i = 0; i < steps; ++i) {
    if (jbd_step(st, prov) != StepResult::ok)
      throw Error("unexpected breakdown at step " + std::to_string(st.k + 1));
    coll.step(st);
  }
  return DiagRun{std::move(st), coll.rows()};
}

std::vector<std::vector<double>> theta_history(const BidiagPair& coeffs,
                                               BidiagSide side, int steps) {
  std::vector<std::vector<double>> hist(steps);
  for (int k = 1; k <= steps; ++k)
    hist[k - 1] = bidiagonal_singular_values(coeffs, side, k);
  return hist;
}

int max_copies(const RitzTrace& tr, double value, double tol) {
  int best = 0;
  for (int s = 1; s <= tr.last_flagged_step; ++s)
    best = std::max(best, converged_copies(tr, s, value, tol));
  return best;
}

double nearest_flagged(const RitzTrace& tr, int step, double target) {
  const auto& vals = tr.thetas[step - 1];
  const auto& flags = tr.converged[step - 1];
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (flags[i]) best = std::min(best, std::fabs(vals[i] - target));
  return best;
}

double median5(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

int main() {
  // Shared fixtures: the two 800-column pairs and their explicit factors.
  GeneratedPair cs = make_cs_pair(800, cs800_profile(), 0);
  SparsePair cs_pair{cs.a, cs.l};
  auto cs_qr = make_explicit_qr_provider(cs_pair);
  const std::vector<double> cs_b(cs_pair.m(), 1.0);

  // ---- criteria 1-5, 7: one 200-step diagnostics run per strategy --------
  const int K = 200;
  const double t0 = now_s();
  DiagRun none = run_with_diagnostics(*cs_qr, cs_b, K, StrategyKind::none);
  DiagRun part = run_with_diagnostics(*cs_qr, cs_b, K, StrategyKind::partial);
  DiagRun full = run_with_diagnostics(*cs_qr, cs_b, K, StrategyKind::full);
  const double t_runs = now_s() - t0;

  {  // 1: identity residual under every strategy
    double worst = 0.0;
    for (const DiagRun* r : {&none, &part, &full})
      for (const DiagnosticsRow& row : r->rows)
        worst = std::max(worst, row.hk);
    const bool ok = worst <= 100 * kEps && t_runs <= 60.0;
    report(1, ok,
           "identity residual: max hk " + fmt(worst) + " vs bound " +
               fmt(100 * kEps) + ", three 200-step runs in " + fmt(t_runs) +
               " s (limit 60)");
  }

  {  // 2: B-side projection residual, partial and full
    double worst = 0.0;
    for (const DiagRun* r : {&part, &full})
      for (const DiagnosticsRow& row : r->rows)
        worst = std::max(worst, row.ek);
    report(2, worst <= 100 * kEps,
           "B residual: max ek " + fmt(worst) + " vs bound " + fmt(100 * kEps));
  }

  {  // 3: Bhat-side projection residual against its inverse-norm bound
    double worst_ratio = 0.0;
    for (const DiagRun* r : {&part, &full})
      for (const DiagnosticsRow& row : r->rows)
        worst_ratio =
            std::max(worst_ratio, row.ehat / (1000.0 * row.bhat_inv * kEps));
    report(3, worst_ratio <= 1.0,
           "Bhat residual: worst ehat / (1000*inv*eps) = " + fmt(worst_ratio));
  }

  {  // 4: semiorthogonality of U and Vt under partial reorthogonalization
    const double bound = 2.0 * std::sqrt(kEps / (2.0 * K + 1.0));
    double worst = 0.0;
    for (const DiagnosticsRow& row : part.rows)
      worst = std::max({worst, row.kappa_u, row.kappa_vt});
    long long events = 0;
    for (const StepReorth& sr : part.state.reorth.steps)
      events += !sr.t_set.empty() + !sr.s_set.empty();
    const bool ok = worst <= bound && events > 0;
    report(4, ok,
           "semiorthogonality: max kappa " + fmt(worst) + " vs 2*omega0 = " +
               fmt(bound) + ", " + std::to_string(events) + " reorth events");
  }

  {  // 5: Uhat orthogonality bound from the hat inverse norm
    const double eta = std::pow(kEps, 0.75);
    double worst_ratio = 0.0;
    for (const DiagnosticsRow& row : part.rows)
      worst_ratio = std::max(
          worst_ratio,
          row.xi_uh / (10.0 * row.bhat_inv * row.bhat_inv * eta));
    report(5, worst_ratio <= 1.0,
           "Uhat bound: worst xi / (10*inv^2*eta) = " + fmt(worst_ratio));
  }

  {  // 7: extreme Ritz values of the same partial run
    std::vector<double> th =
        bidiagonal_singular_values(part.state.coeffs, BidiagSide::b, K);
    const double c1_err = std::fabs(th.front() - 0.75);

    RitzTrace tr =
        ritz_trace(theta_history(part.state.coeffs, BidiagSide::b, K));
    double smallest = std::numeric_limits<double>::infinity();
    const auto& vals = tr.thetas[tr.last_flagged_step - 1];
    const auto& flags = tr.converged[tr.last_flagged_step - 1];
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (flags[i]) smallest = std::min(smallest, vals[i]);
    const double tail_err = std::fabs(smallest - 0.250625);
    const bool ok = c1_err <= 1e-10 && tail_err <= 1e-8;
    report(7, ok,
           "extremes: |c1 - 0.75| = " + fmt(c1_err) +
               " (<= 1e-10), smallest converged " + fmt(smallest) +
               " vs 0.250625, err " + fmt(tail_err) + " (<= 1e-8)");
  }

  {  // 6: ghost behaviour on the multiplicity pair
    const double t6 = now_s();
    GeneratedPair mult = make_multiplicity_pair();
    SparsePair mult_pair{mult.a, mult.l};
    auto mult_qr = make_explicit_qr_provider(mult_pair);
    const std::vector<double> mb(mult_pair.m(), 1.0);
    const int Km = 300;

    StrategyConfig cn;
    cn.kind = StrategyKind::none;
    JbdState sn = jbd_run(*mult_qr, mb, Km, cn);
    StrategyConfig cp;
    cp.kind = StrategyKind::partial;
    JbdState sp = jbd_run(*mult_qr, mb, Km, cp);

    RitzTrace none_b =
        ritz_trace(theta_history(sn.coeffs, BidiagSide::b, Km));
    RitzTrace none_h =
        ritz_trace(theta_history(sn.coeffs, BidiagSide::bhat, Km));
    RitzTrace part_b =
        ritz_trace(theta_history(sp.coeffs, BidiagSide::b, Km));
    RitzTrace part_h =
        ritz_trace(theta_history(sp.coeffs, BidiagSide::bhat, Km));

    const std::size_t ghosts_none = none_b.ghosts.size() + none_h.ghosts.size();
    const std::size_t ghosts_part = part_b.ghosts.size() + part_h.ghosts.size();

    const double copy_tol = 1e-6;
    const int none_86 = max_copies(none_b, 0.86, copy_tol);
    const int part_86_last =
        converged_copies(part_b, part_b.last_flagged_step, 0.86, copy_tol);
    const int part_15_last =
        converged_copies(part_b, part_b.last_flagged_step, 0.15, copy_tol);
    const int part_86_max = max_copies(part_b, 0.86, copy_tol);
    const int part_15_max = max_copies(part_b, 0.15, copy_tol);

    const double hi_err =
        nearest_flagged(part_b, part_b.last_flagged_step, 0.90);
    const double lo_err =
        nearest_flagged(part_b, part_b.last_flagged_step, 0.10);
    const double t6_total = now_s() - t6;

    const bool ok = ghosts_none >= 1 && none_86 > 2 && ghosts_part == 0 &&
                    part_86_last == 2 && part_15_last == 2 &&
                    part_86_max == 2 && part_15_max == 2 && hi_err <= 1e-8 &&
                    lo_err <= 1e-8 && t6_total <= 300.0;
    report(6, ok,
           "ghosts: none " + std::to_string(ghosts_none) + " events, " +
               std::to_string(none_86) + " copies of 0.86; partial " +
               std::to_string(ghosts_part) + " events, copies 0.86/0.15 = " +
               std::to_string(part_86_last) + "/" +
               std::to_string(part_15_last) + ", extreme errs " + fmt(hi_err) +
               "/" + fmt(lo_err) + ", " + fmt(t6_total) + " s (limit 300)");
  }

  {  // 8: agreement with a dense Golub-Kahan oracle on random pairs
    double worst = 0.0;
    for (const auto& [n, seed] :
         std::vector<std::pair<int, std::uint64_t>>{{60, 11}, {120, 12},
                                                    {200, 13}}) {
      std::vector<double> c(n);
      for (int i = 0; i < n; ++i)
        c[i] = 0.05 + 0.9 * unit_uniform(seed, static_cast<std::uint64_t>(i));
      GeneratedPair gp = make_cs_pair(n, c, seed);
      SparsePair pr{gp.a, gp.l};
      auto prov = make_explicit_qr_provider(pr);
      std::vector<double> b(pr.m(), 1.0);
      StrategyConfig cfg;
      cfg.kind = StrategyKind::full;
      const int k8 = 10;
      JbdState st = jbd_run(*prov, b, k8, cfg);

      test::GkOracle oracle = test::dense_golub_kahan(prov->q_a(), b, k8);
      for (int i = 0; i < k8; ++i) {
        worst = std::max(worst,
                         std::fabs(st.coeffs.alpha[i] - oracle.alpha[i]));
        worst = std::max(worst,
                         std::fabs(st.coeffs.beta[i + 1] - oracle.beta[i + 1]));
      }
    }
    report(8, worst <= 1e-12,
           "dense oracle: max |B_k entry difference| " + fmt(worst) +
               " (<= 1e-12) over three random pairs");
  }

  {  // 9: estimate envelopes bound brute-force inner products
    GeneratedPair mult = make_multiplicity_pair();
    SparsePair mult_pair{mult.a, mult.l};
    auto mult_qr = make_explicit_qr_provider(mult_pair);

    double worst_ratio = 0.0;
    int gated = 0;
    for (int which = 0; which < 2; ++which) {
      const ProjectionProvider& prov = which == 0 ? *cs_qr : *mult_qr;
      std::vector<double> b(prov.m(), 1.0);
      StrategyConfig cfg;
      cfg.kind = StrategyKind::none;
      JbdState st = jbd_init(prov, b, cfg, 30);
      for (int k = 1; k <= 30; ++k) {
        if (jbd_step(st, prov) != StepResult::ok) break;
        for (int j = 0; j < k; ++j) {
          const double tu = std::fabs(test::dotv(st.u_basis.col_span(k),
                                                 st.u_basis.col_span(j)));
          if (tu > 100 * kEps) {
            ++gated;
            worst_ratio = std::max(worst_ratio, tu / st.tracker.mu_curr[j]);
          }
          const double tv = std::fabs(test::dotv(st.vt_basis.col_span(k),
                                                 st.vt_basis.col_span(j)));
          if (tv > 100 * kEps) {
            ++gated;
            worst_ratio = std::max(worst_ratio, tv / st.tracker.nu_curr[j]);
          }
        }
      }
    }
    report(9, worst_ratio <= 10.0,
           "estimate soundness: worst truth/estimate " + fmt(worst_ratio) +
               " (<= 10) over " + std::to_string(gated) +
               " entries above 100*eps");
  }

  {  // 10: partial does less reorthogonalization work than full
    auto bare = [&](StrategyKind kind) {
      StrategyConfig cfg;
      cfg.kind = kind;
      const double t = now_s();
      JbdState st = jbd_run(*cs_qr, cs_b, K, cfg);
      const double wall = now_s() - t;
      const long long ops =
          st.reorth.ops_u + st.reorth.ops_v + st.reorth.ops_uhat;
      return std::pair<double, long long>{wall, ops};
    };
    std::vector<double> wp, wf;
    long long ops_p = 0, ops_f = 0;
    for (int rep = 0; rep < 5; ++rep) {
      auto [tw, to] = bare(StrategyKind::partial);
      wp.push_back(tw);
      ops_p = to;
      auto [fw, fo] = bare(StrategyKind::full);
      wf.push_back(fw);
      ops_f = fo;
    }
    const double mp = median5(wp), mf = median5(wf);
    const bool ok = ops_p < ops_f && mp <= mf;
    report(10, ok,
           "efficiency: ops partial " + std::to_string(ops_p) + " < full " +
               std::to_string(ops_f) + "; median wall " + fmt(mp) + " s <= " +
               fmt(mf) + " s");
  }

  {  // 11: coefficient agreement between projector backends
    LsqrOptions opts;
    opts.atol = 1e-14;
    auto cs_ls = make_lsqr_provider(cs_pair, opts);
    StrategyConfig cfg;
    cfg.kind = StrategyKind::full;
    JbdState sq = jbd_run(*cs_qr, cs_b, 50, cfg);
    JbdState sl = jbd_run(*cs_ls, cs_b, 50, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < sq.coeffs.alpha.size(); ++i) {
      const double denom =
          std::max(std::fabs(sq.coeffs.alpha[i]), std::fabs(sl.coeffs.alpha[i]));
      worst = std::max(worst,
                       std::fabs(sq.coeffs.alpha[i] - sl.coeffs.alpha[i]) / denom);
    }
    for (std::size_t i = 0; i < sq.coeffs.beta.size(); ++i) {
      const double denom =
          std::max(std::fabs(sq.coeffs.beta[i]), std::fabs(sl.coeffs.beta[i]));
      worst = std::max(worst,
                       std::fabs(sq.coeffs.beta[i] - sl.coeffs.beta[i]) / denom);
    }
    report(11, worst <= 1e-8,
           "projector consistency: worst relative alpha/beta gap " +
               fmt(worst) + " (<= 1e-8) over 50 steps");
  }

  std::printf("%s\n", g_all_ok ? "acceptance: all criteria passed"
                               : "acceptance: FAILURES present");
  return g_all_ok ? 0 : 1;
}
