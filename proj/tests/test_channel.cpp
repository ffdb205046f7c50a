#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "bdris/channel.hpp"

#include "support.hpp"

using bdris::ChannelSet;
using bdris::CMatrix;
using bdris::Complex;
using bdris::ScenarioConfig;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("path_loss evaluates the reference formula") {
  // 10^(-30/10) * 1^(-3.5) = 1e-3.
  CHECK_THAT(bdris::path_loss(1.0, 3.5, -30.0), WithinRel(1e-3, 1e-14));
  // Zero exponent leaves only the reference loss.
  CHECK_THAT(bdris::path_loss(150.0, 0.0, -30.0), WithinRel(1e-3, 1e-14));
  // 1e-3 * 150^(-3.5), evaluated with extended precision offline.
  CHECK_THAT(bdris::path_loss(150.0, 3.5, -30.0),
             WithinRel(2.4192491286747438e-11, 1e-13));
}

TEST_CASE("path_loss rejects non-positive distances") {
  CHECK_THROWS_AS(bdris::path_loss(0.0, 2.0, -30.0), std::domain_error);
  CHECK_THROWS_AS(bdris::path_loss(-3.0, 2.0, -30.0), std::domain_error);
}

TEST_CASE("path_loss decreases with distance for positive exponents") {
  double prev = bdris::path_loss(1.0, 2.2, -30.0);
  for (double d : {2.0, 10.0, 55.0, 150.0, 800.0}) {
    const double cur = bdris::path_loss(d, 2.2, -30.0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("power helpers use the dBm and SNR conventions") {
  const ScenarioConfig cfg;  // -80 dBm noise, 20 dB transmit SNR
  CHECK_THAT(bdris::noise_power_watts(cfg), WithinRel(1e-11, 1e-14));
  CHECK_THAT(bdris::transmit_power(cfg), WithinRel(1e-9, 1e-14));
}

TEST_CASE("ScenarioConfig validation names the offending keys") {
  ScenarioConfig cfg;

  cfg.trials = 0;
  CHECK_THROWS_WITH(cfg.validate(),
                    Catch::Matchers::ContainsSubstring("trials"));

  cfg = ScenarioConfig{};
  cfg.N = 7;
  cfg.group_size = 2;
  CHECK_THROWS_WITH(cfg.validate(),
                    Catch::Matchers::ContainsSubstring("group_size"));

  cfg = ScenarioConfig{};
  cfg.d_br = 0.0;
  CHECK_THROWS_WITH(cfg.validate(),
                    Catch::Matchers::ContainsSubstring("d_br"));
}

TEST_CASE("sample_channels shapes follow the config") {
  ScenarioConfig cfg;
  cfg.L = 4;
  cfg.K = 4;
  cfg.N = 8;
  const ChannelSet ch = bdris::sample_channels(cfg, 0);
  CHECK(ch.G_mat.rows() == 4);
  CHECK(ch.G_mat.cols() == 4);
  CHECK(ch.H_mat.rows() == 8);
  CHECK(ch.H_mat.cols() == 4);
  CHECK(ch.E_mat.rows() == 8);
  CHECK(ch.E_mat.cols() == 4);
  CHECK(ch.antennas() == 4);
  CHECK(ch.users() == 4);
  CHECK(ch.ris_elements() == 8);
  CHECK(ch.noise_power == bdris::noise_power_watts(cfg));
}

TEST_CASE("sample_channels is deterministic in (seed, trial)") {
  ScenarioConfig cfg;
  cfg.seed = 77;
  const ChannelSet a = bdris::sample_channels(cfg, 5);
  const ChannelSet b = bdris::sample_channels(cfg, 5);
  CHECK((a.G_mat - b.G_mat).norm() == 0.0);
  CHECK((a.H_mat - b.H_mat).norm() == 0.0);
  CHECK((a.E_mat - b.E_mat).norm() == 0.0);

  const ChannelSet c = bdris::sample_channels(cfg, 6);
  CHECK((a.G_mat - c.G_mat).norm() != 0.0);

  cfg.seed = 78;
  const ChannelSet d = bdris::sample_channels(cfg, 5);
  CHECK((a.G_mat - d.G_mat).norm() != 0.0);
}

TEST_CASE("sample_channels entries carry the link path loss as variance") {
  ScenarioConfig cfg;
  cfg.N = 2;  // only G is inspected; keep the draw small
  const double expected = bdris::path_loss(cfg.d_bu, cfg.gamma_bu, cfg.zeta0_db);

  double acc = 0.0;
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    const ChannelSet ch = bdris::sample_channels(cfg, static_cast<std::uint64_t>(t));
    acc += ch.G_mat.squaredNorm();
  }
  const double per_entry = acc / (draws * cfg.L * cfg.K);
  CHECK_THAT(per_entry, WithinRel(expected, 0.05));
}

TEST_CASE("effective_channel with zero reflection returns the direct link") {
  const ChannelSet ch = testsupport::unit_channelset(3, 2, 4, 11);
  const CMatrix f = bdris::effective_channel(ch, CMatrix::Zero(4, 4));
  CHECK((f - ch.G_mat).norm() == 0.0);
}

TEST_CASE("effective_channel scalar case") {
  // g = 1, h = 2, E = 3, theta = e^{j pi}: f = 1 + 3 * (-1) * 2 = -5.
  ChannelSet ch;
  ch.G_mat = CMatrix::Constant(1, 1, Complex(1.0, 0.0));
  ch.H_mat = CMatrix::Constant(1, 1, Complex(2.0, 0.0));
  ch.E_mat = CMatrix::Constant(1, 1, Complex(3.0, 0.0));
  const CMatrix theta =
      CMatrix::Constant(1, 1, std::exp(Complex(0.0, M_PI)));
  const CMatrix f = bdris::effective_channel(ch, theta);
  CHECK_THAT(f(0, 0).real(), WithinAbs(-5.0, 1e-12));
  CHECK_THAT(f(0, 0).imag(), WithinAbs(0.0, 1e-12));
}

TEST_CASE("effective_channel matches a triple-loop evaluation") {
  const int l = 3, k = 2, n = 4;
  const ChannelSet ch = testsupport::unit_channelset(l, k, n, 23);
  const CMatrix theta = testsupport::random_cmatrix(n, n, 29);

  const CMatrix f = bdris::effective_channel(ch, theta);
  // f(l, k) = G(l, k) + sum_{m, p} conj(E(p, l)) conj(theta(m, p)) H(m, k).
  for (int col = 0; col < k; ++col) {
    for (int row = 0; row < l; ++row) {
      Complex acc = ch.G_mat(row, col);
      for (int p = 0; p < n; ++p) {
        for (int m = 0; m < n; ++m) {
          acc += std::conj(ch.E_mat(p, row)) * std::conj(theta(m, p)) *
                 ch.H_mat(m, col);
        }
      }
      CHECK_THAT(std::abs(f(row, col) - acc), WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("effective_channel is affine in theta") {
  const int n = 5;
  const ChannelSet ch = testsupport::unit_channelset(4, 3, n, 31);
  const CMatrix t1 = testsupport::random_cmatrix(n, n, 37);
  const CMatrix t2 = testsupport::random_cmatrix(n, n, 41);

  const CMatrix f0 = bdris::effective_channel(ch, CMatrix::Zero(n, n));
  const CMatrix lhs = bdris::effective_channel(ch, t1 + t2) - f0;
  const CMatrix rhs = (bdris::effective_channel(ch, t1) - f0) +
                      (bdris::effective_channel(ch, t2) - f0);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("effective_channel rejects mismatched dimensions") {
  const ChannelSet ch = testsupport::unit_channelset(3, 2, 4, 43);
  CHECK_THROWS_AS(bdris::effective_channel(ch, CMatrix::Zero(3, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(bdris::effective_channel(ch, CMatrix::Zero(4, 3)),
                  std::invalid_argument);
}
