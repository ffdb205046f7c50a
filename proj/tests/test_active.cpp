#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "bdris/active.hpp"

#include "support.hpp"

using bdris::CMatrix;
using bdris::Complex;
using bdris::FPState;
using bdris::Precoder;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testsupport::random_cmatrix;

TEST_CASE("sinr on a hand-built instance") {
  // Single user, matched filter: SINR = P ||f||^2 / sigma^2.
  CMatrix f(2, 1);
  f << 1.0, 0.0;
  Precoder w{CMatrix(2.0 * f), 4.0};
  CHECK_THAT(bdris::sinr(f, w, 0, 0.5), WithinRel(8.0, 1e-12));

  // Orthogonal two-user instance with unit gains and sigma^2 = 1:
  // no interference, SINR_k = |a|^2.
  CMatrix f2 = CMatrix::Identity(2, 2);
  Precoder w2{CMatrix(3.0 * CMatrix::Identity(2, 2)), 18.0};
  CHECK_THAT(bdris::sinr(f2, w2, 0, 1.0), WithinRel(9.0, 1e-12));
  CHECK_THAT(bdris::sinr(f2, w2, 1, 1.0), WithinRel(9.0, 1e-12));

  CHECK_THROWS_AS(bdris::sinr(f2, w2, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bdris::sinr(f2, Precoder{CMatrix::Zero(3, 2), 1.0}, 0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("sinr accounts for interference") {
  CMatrix f(2, 2);
  f << 1.0, 1.0, 0.0, 0.0;  // both users share the same channel direction
  Precoder w{CMatrix::Identity(2, 2), 2.0};
  // Signal |f_0^H w_0|^2 = 1, interference |f_0^H w_1|^2 = 0, noise 1.
  CHECK_THAT(bdris::sinr(f, w, 0, 1.0), WithinRel(1.0, 1e-12));
  // User 1: signal |f_1^H w_1|^2 = 0, so SINR = 0.
  CHECK_THAT(bdris::sinr(f, w, 1, 1.0), WithinAbs(0.0, 1e-15));
}

TEST_CASE("sum_rate on the symmetric two-user instance") {
  // SINR_k = 1 each gives 2 log2(2) = 2 bit/s/Hz.
  const CMatrix f = CMatrix::Identity(2, 2);
  const double sigma2 = 0.25;
  Precoder w{CMatrix(0.5 * CMatrix::Identity(2, 2)), 0.5};
  CHECK_THAT(bdris::sum_rate(f, w, sigma2), WithinAbs(2.0, 1e-12));
}

TEST_CASE("sum_rate is invariant to per-column phase rotations") {
  const CMatrix f = random_cmatrix(4, 3, 401);
  CMatrix w_mat = random_cmatrix(4, 3, 409);
  const Precoder w{w_mat, w_mat.squaredNorm()};
  const double base = bdris::sum_rate(f, w, 0.3);

  CMatrix rotated = w_mat;
  rotated.col(1) *= std::exp(Complex(0.0, 1.234));
  rotated.col(2) *= std::exp(Complex(0.0, -2.5));
  CHECK_THAT(bdris::sum_rate(f, Precoder{rotated, w.power_budget}, 0.3),
             WithinRel(base, 1e-12));
}

TEST_CASE("rzf_beamforming spends the budget and matches known shapes") {
  const double p_t = 2.0, sigma2 = 0.1;

  // Identity channel: the precoder is a scaled identity.
  const CMatrix f = CMatrix::Identity(3, 3);
  const Precoder w = bdris::rzf_beamforming(f, p_t, sigma2);
  CHECK_THAT(w.power(), WithinRel(p_t, 1e-12));
  const double diag = std::sqrt(p_t / 3.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double expected = i == j ? diag : 0.0;
      CHECK_THAT(std::abs(w.W(i, j)), WithinAbs(expected, 1e-12));
    }
  }

  // Single user: direction is the matched filter.
  const CMatrix f1 = random_cmatrix(4, 1, 419);
  const Precoder w1 = bdris::rzf_beamforming(f1, p_t, sigma2);
  const bdris::CVector expected =
      std::sqrt(p_t) * f1.col(0) / f1.col(0).norm();
  // Up to a unit phase, which RZF leaves at zero for K = 1.
  CHECK((w1.W.col(0) - expected).norm() < 1e-10);

  CHECK_THROWS_AS(bdris::rzf_beamforming(CMatrix::Zero(3, 2), p_t, sigma2),
                  std::invalid_argument);
  CHECK_THROWS_AS(bdris::rzf_beamforming(f, 0.0, sigma2),
                  std::invalid_argument);
  CHECK_THROWS_AS(bdris::rzf_beamforming(f, p_t, 0.0),
                  std::invalid_argument);
}

TEST_CASE("fp_beamforming recovers the single-user matched filter") {
  const double p_t = 3.0, sigma2 = 0.2;
  const CMatrix f = random_cmatrix(4, 1, 431);
  const auto [w, state] = bdris::fp_beamforming(f, p_t, sigma2);

  const double expected =
      std::log2(1.0 + p_t * f.squaredNorm() / sigma2);
  CHECK_THAT(bdris::sum_rate(f, w, sigma2), WithinRel(expected, 1e-8));
  CHECK(state.converged);
  CHECK(w.power() <= p_t * (1.0 + 1e-6));
}

TEST_CASE("fp_beamforming trace is monotone and power feasible") {
  const double p_t = 5.0, sigma2 = 0.5;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CMatrix f = random_cmatrix(4, 4, 10000 + seed);
    const auto [w, state] = bdris::fp_beamforming(f, p_t, sigma2);

    REQUIRE(state.objective_trace.size() >= 2);
    for (size_t i = 1; i < state.objective_trace.size(); ++i) {
      CHECK(state.objective_trace[i] >=
            state.objective_trace[i - 1] - 1e-9);
    }
    REQUIRE(state.power_trace.size() == state.objective_trace.size());
    for (double p : state.power_trace) {
      CHECK(p <= p_t * (1.0 + 1e-6));
    }
    CHECK_THAT(bdris::sum_rate(f, w, sigma2),
               WithinRel(state.objective_trace.back(), 1e-12));
  }
}

TEST_CASE("fp_beamforming dual satisfies complementary slackness") {
  const double p_t = 1.5, sigma2 = 0.25;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CMatrix f = random_cmatrix(3, 3, 11000 + seed);
    const auto [w, state] = bdris::fp_beamforming(f, p_t, sigma2);
    if (state.dual_mu > 0.0) {
      CHECK_THAT(w.power(), WithinRel(p_t, 1e-6));
    }
  }
}

TEST_CASE("fp_beamforming handles the zero channel") {
  const auto [w, state] = bdris::fp_beamforming(CMatrix::Zero(3, 2), 1.0, 0.1);
  CHECK(w.W.norm() == 0.0);
  CHECK(state.converged);
  CHECK(state.objective_trace.back() == 0.0);
}

TEST_CASE("fp_beamforming reports non-convergence") {
  // tol = 0 cannot be met while the rate still moves; the flag must say so.
  const CMatrix f = random_cmatrix(4, 4, 443);
  const auto [w, state] = bdris::fp_beamforming(f, 2.0, 0.3, 0.0, 3);
  CHECK(state.iterations == 3);
  CHECK_FALSE(state.converged);
  CHECK(state.objective_trace.size() == 4);
  // Best iterate is still returned.
  CHECK_THAT(bdris::sum_rate(f, w, 0.3),
             WithinRel(state.objective_trace.back(), 1e-12));
}

TEST_CASE("fp_beamforming validates inputs") {
  const CMatrix f = random_cmatrix(2, 2, 449);
  CHECK_THROWS_AS(bdris::fp_beamforming(f, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(bdris::fp_beamforming(f, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("fp_beamforming auxiliaries match the final precoder scale") {
  const double p_t = 2.0, sigma2 = 0.4;
  const CMatrix f = random_cmatrix(4, 4, 457);
  const auto [w, state] = bdris::fp_beamforming(f, p_t, sigma2, 1e-9, 500);
  REQUIRE(state.converged);
  // At a fixed point the SINR auxiliaries coincide with the achieved
  // SINRs; with a 1e-9 stopping tolerance they agree tightly.  A user
  // starved to zero power has both values at rounding level, where the
  // relative comparison is meaningless.
  for (int k = 0; k < 4; ++k) {
    const double achieved = bdris::sinr(f, w, k, sigma2);
    if (achieved < 1e-12 && state.aux_sinr(k) < 1e-12) continue;
    CHECK_THAT(state.aux_sinr(k),
               WithinRel(achieved, 1e-3));
  }
}
