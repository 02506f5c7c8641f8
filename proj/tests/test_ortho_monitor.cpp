#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "jbd/errors.hpp"
#include "jbd/ortho_monitor.hpp"
#include "jbd/rng.hpp"

using namespace jbd;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Test-local mirror of the published estimate recurrences, kept independent
// of the library loops so a regression there trips these comparisons.
struct MirrorTracker {
  std::vector<double> mu{1.0}, nu{1.0};
  double err_scale;

  void advance_mu(const std::vector<double>& alpha,
                  const std::vector<double>& beta, double beta_next) {
    const int i = static_cast<int>(mu.size());
    std::vector<double> next(i + 1);
    for (int j = 1; j <= i - 1; ++j) {
      const double prev_nu = j >= 2 ? nu[j - 2] : 0.0;
      const double num = alpha[j - 1] * nu[j - 1] + beta[j - 1] * prev_nu -
                         alpha[i - 1] * mu[j - 1];
      next[j - 1] = std::fabs(num) / beta_next +
                    err_scale * (beta_next + alpha[i - 1]) * kEps / beta_next;
    }
    next[i - 1] = err_scale * kEps * std::min(1.0, alpha[i - 1]) / beta_next;
    next[i] = 1.0;
    mu = std::move(next);
  }

  void advance_nu(const std::vector<double>& alpha,
                  const std::vector<double>& beta, double alpha_next) {
    const int i = static_cast<int>(nu.size());
    const double beta_i1 = beta[i];
    std::vector<double> next(i + 1);
    for (int j = 1; j <= i; ++j) {
      const double num = beta[j] * mu[j] + alpha[j - 1] * mu[j - 1] -
                         beta_i1 * nu[j - 1];
      next[j - 1] = std::fabs(num) / alpha_next +
                    err_scale * (alpha_next + beta_i1) * kEps / alpha_next;
    }
    next[i] = 1.0;
    nu = std::move(next);
  }
};

}  // namespace

TEST_CASE("tracker starts as a single exact entry") {
  OrthoTracker t = make_tracker(1e-8, 1e-12, 10.0, 3);
  CHECK(t.size() == 1);
  CHECK(t.mu_curr == std::vector<double>{1.0});
  CHECK(t.nu_curr == std::vector<double>{1.0});
  CHECK_THROWS_AS(make_tracker(0.0, 1e-12, 1.0, 0), InvalidInputError);
  CHECK_THROWS_AS(make_tracker(1e-8, -1.0, 1.0, 0), InvalidInputError);
}

TEST_CASE("estimate rows follow the recurrences") {
  OrthoTracker t = make_tracker(1e-8, 1e-12, 37.0, 0);
  MirrorTracker mirror;
  mirror.err_scale = 37.0;

  std::vector<double> alpha, beta;
  beta.push_back(1.25);  // starting normalization
  for (int step = 1; step <= 8; ++step) {
    alpha.push_back(0.5 + unit_uniform(91, 2 * step));
    const double beta_next = 0.5 + unit_uniform(91, 2 * step + 1);
    const double alpha_next = 0.4 + unit_uniform(92, step);

    update_mu(t, alpha, beta, beta_next);
    beta.push_back(beta_next);
    update_nu(t, alpha, beta, alpha_next);

    mirror.advance_mu(alpha, {beta.begin(), beta.end() - 1}, beta_next);
    mirror.advance_nu(alpha, beta, alpha_next);

    REQUIRE(t.mu_curr.size() == mirror.mu.size());
    REQUIRE(t.nu_curr.size() == mirror.nu.size());
    for (std::size_t j = 0; j < mirror.mu.size(); ++j)
      CHECK(t.mu_curr[j] == doctest::Approx(mirror.mu[j]).epsilon(1e-12));
    for (std::size_t j = 0; j < mirror.nu.size(); ++j)
      CHECK(t.nu_curr[j] == doctest::Approx(mirror.nu[j]).epsilon(1e-12));

    CHECK(t.mu_curr.back() == 1.0);
    CHECK(t.nu_curr.back() == 1.0);
    for (double v : t.mu_curr) CHECK(v > 0.0);
  }
}

TEST_CASE("row advancement validates its inputs") {
  OrthoTracker t = make_tracker(1e-8, 1e-12, 1.0, 0);
  std::vector<double> alpha{0.9}, beta{1.0};
  CHECK_THROWS_AS(update_mu(t, alpha, beta, 0.0), InvalidInputError);
  CHECK_THROWS_AS(update_mu(t, {}, beta, 1.0), InvalidInputError);
  // nu before mu for the same step
  CHECK_THROWS_AS(update_nu(t, alpha, beta, 1.0), InvalidInputError);
}

TEST_CASE("selection takes eta-runs containing an omega0 crossing") {
  const double eta = 1e-12, om = 1e-8;

  CHECK(select_indices({5e-13, 2e-12, 2e-8, 2e-12, 5e-13}, om, eta) ==
        std::vector<int>{1, 2, 3});
  // above eta but never above omega0: nothing fires
  CHECK(select_indices({2e-12, 5e-13, 2e-12}, om, eta).empty());
  // only the run with the crossing is taken
  CHECK(select_indices({2e-12, 5e-13, 2e-8}, om, eta) == std::vector<int>{2});
  // exactly eta is not above eta
  CHECK(select_indices({eta, 2e-8}, om, eta) == std::vector<int>{1});
  // two separate firing runs
  CHECK(select_indices({2e-8, 5e-13, 2e-8, 2e-12}, om, eta) ==
        std::vector<int>{0, 2, 3});
  CHECK(select_indices({}, om, eta).empty());
}

TEST_CASE("reset noise lands in the documented band") {
  OrthoTracker t = make_tracker(1e-8, 1e-12, 1.0, 1234);
  std::vector<double> row(6, 0.5);
  reset_entries(t, row, {0, 2, 5});
  for (int idx : {0, 2, 5}) {
    CHECK(row[idx] >= 0.75 * kEps);
    CHECK(row[idx] < 1.5 * kEps);
  }
  CHECK(row[1] == 0.5);
  CHECK(t.noise_counter == 3);

  // same seed and a fresh counter reproduce the same draws
  OrthoTracker t2 = make_tracker(1e-8, 1e-12, 1.0, 1234);
  std::vector<double> row2(6, 0.5);
  reset_entries(t2, row2, {0, 2, 5});
  CHECK(row2 == row);

  CHECK_THROWS_AS(reset_entries(t, row, {7}), InvalidInputError);
}
