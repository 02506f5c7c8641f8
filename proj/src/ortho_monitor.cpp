#include "jbd/ortho_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jbd/errors.hpp"
#include "jbd/rng.hpp"

namespace jbd {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

OrthoTracker make_tracker(double omega0, double eta, double err_scale,
                          std::uint64_t noise_seed) {
  if (!(omega0 > 0.0) || !(eta > 0.0))
    throw InvalidInputError("tracker thresholds must be positive");
  OrthoTracker t;
  t.mu_curr = {1.0};
  t.nu_curr = {1.0};
  t.omega0 = omega0;
  t.eta = eta;
  t.err_scale = err_scale;
  t.noise_seed = noise_seed;
  return t;
}

void update_mu(OrthoTracker& t, const std::vector<double>& alpha,
               const std::vector<double>& beta, double beta_next) {
  const int i = t.size();  // current row index, 1-based
  if (static_cast<int>(alpha.size()) < i || static_cast<int>(beta.size()) < i)
    throw InvalidInputError("update_mu: coefficient history shorter than row");
  if (!(beta_next > 0.0))
    throw InvalidInputError("update_mu: nonpositive normalization");

  const double theta = t.err_scale * (beta_next + alpha[i - 1]) * kEps / beta_next;
  std::vector<double> next(i + 1);
  for (int j = 1; j <= i - 1; ++j) {
    const double prev_nu = j >= 2 ? t.nu_curr[j - 2] : 0.0;
    const double num = alpha[j - 1] * t.nu_curr[j - 1] + beta[j - 1] * prev_nu -
                       alpha[i - 1] * t.mu_curr[j - 1];
    next[j - 1] = std::fabs(num) / beta_next + theta;
  }
  // The recurrence row does not cover the immediately preceding vector; the
  // subtraction of alpha_i u_i inside the main process keeps that pair
  // orthogonal to working accuracy, so give it an epsilon-level estimate.
  next[i - 1] = t.err_scale * kEps * std::min(1.0, alpha[i - 1]) / beta_next;
  next[i] = 1.0;

  t.mu_prev = std::move(t.mu_curr);
  t.mu_curr = std::move(next);
}

void update_nu(OrthoTracker& t, const std::vector<double>& alpha,
               const std::vector<double>& beta, double alpha_next) {
  const int i = static_cast<int>(t.nu_curr.size());  // nu row index
  if (static_cast<int>(t.mu_curr.size()) != i + 1)
    throw InvalidInputError("update_nu: mu row must be advanced first");
  if (static_cast<int>(alpha.size()) < i || static_cast<int>(beta.size()) < i + 1)
    throw InvalidInputError("update_nu: coefficient history shorter than row");
  if (!(alpha_next > 0.0))
    throw InvalidInputError("update_nu: nonpositive normalization");

  const double beta_i1 = beta[i];  // accepted beta_{i+1}
  const double theta = t.err_scale * (alpha_next + beta_i1) * kEps / alpha_next;
  std::vector<double> next(i + 1);
  for (int j = 1; j <= i; ++j) {
    const double num = beta[j] * t.mu_curr[j] + alpha[j - 1] * t.mu_curr[j - 1] -
                       beta_i1 * t.nu_curr[j - 1];
    next[j - 1] = std::fabs(num) / alpha_next + theta;
  }
  next[i] = 1.0;

  t.nu_prev = std::move(t.nu_curr);
  t.nu_curr = std::move(next);
}

std::vector<int> select_indices(const std::vector<double>& levels,
                                double omega0, double eta) {
  const int n = static_cast<int>(levels.size());
  std::vector<int> out;
  int j = 0;
  while (j < n) {
    if (!(levels[j] > eta)) {
      ++j;
      continue;
    }
    int end = j;
    bool crossed = false;
    while (end < n && levels[end] > eta) {
      if (levels[end] > omega0) crossed = true;
      ++end;
    }
    if (crossed)
      for (int l = j; l < end; ++l) out.push_back(l);
    j = end;
  }
  return out;
}

void reset_entries(OrthoTracker& t, std::vector<double>& row,
                   const std::vector<int>& indices) {
  for (int idx : indices) {
    if (idx < 0 || idx >= static_cast<int>(row.size()))
      throw InvalidInputError("reset_entries: index out of range");
    const double u = unit_uniform(t.noise_seed, t.noise_counter++);
    row[idx] = 1.5 * kEps * (0.5 + 0.5 * u);
  }
}

}  // namespace jbd
