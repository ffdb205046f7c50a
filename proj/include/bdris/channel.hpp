#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace bdris {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Simulation scenario: dimensions, geometry, power budget and RNG seeding.
/// Defaults follow the reference setup (L = K = 4, 20 dB transmit SNR,
/// -80 dBm noise, -30 dB reference path loss at 1 m).
struct ScenarioConfig {
  int L = 4;               ///< BS antenna count
  int K = 4;               ///< single-antenna user count
  int N = 16;              ///< RIS element count
  int group_size = 2;      ///< elements per group N_g for the group-connected case
  double d_bu = 150.0;     ///< BS-to-user distance [m]
  double d_br = 70.710678118654752;   ///< BS-to-RIS distance [m] (50*sqrt(2))
  double d_ru = 111.80339887498948;   ///< RIS-to-user distance [m] (50*sqrt(5))
  double gamma_bu = 3.5;   ///< BS-to-user path loss exponent
  double gamma_br = 2.0;   ///< BS-to-RIS path loss exponent
  double gamma_ru = 2.2;   ///< RIS-to-user path loss exponent
  double zeta0_db = -30.0; ///< reference path loss at 1 m [dB]
  double noise_dbm = -80.0;///< per-user noise power [dBm]
  double snr_db = 20.0;    ///< transmit SNR P_t / sigma^2 [dB]
  int trials = 100;        ///< Monte-Carlo realization count
  std::uint64_t seed = 1;  ///< RNG seed

  /// Throws std::invalid_argument naming the offending field.
  void validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (L <= 0) fail("l: must be a positive integer");
    if (K <= 0) fail("k: must be a positive integer");
    if (N <= 0) fail("n: must be a positive integer");
    if (group_size <= 0) fail("group_size: must be a positive integer");
    if (N % group_size != 0)
      fail("n, group_size: group_size (" + std::to_string(group_size) +
           ") must divide n (" + std::to_string(N) + ")");
    if (!(d_bu > 0.0)) fail("d_bu: distance must be positive");
    if (!(d_br > 0.0)) fail("d_br: distance must be positive");
    if (!(d_ru > 0.0)) fail("d_ru: distance must be positive");
    if (gamma_bu < 0.0) fail("gamma_bu: exponent must be non-negative");
    if (gamma_br < 0.0) fail("gamma_br: exponent must be non-negative");
    if (gamma_ru < 0.0) fail("gamma_ru: exponent must be non-negative");
    if (trials <= 0) fail("trials: must be a positive integer");
  }
};

/// One channel realization: direct, RIS-to-user and BS-to-RIS links.
struct ChannelSet {
  CMatrix G_mat;       ///< L x K, column k is the BS-to-user-k channel g_k
  CMatrix H_mat;       ///< N x K, column k is the RIS-to-user-k channel h_k
  CMatrix E_mat;       ///< N x L, BS-to-RIS channel
  double noise_power = 0.0;  ///< sigma^2 [W], identical across users

  int antennas() const { return static_cast<int>(G_mat.rows()); }
  int users() const { return static_cast<int>(G_mat.cols()); }
  int ris_elements() const { return static_cast<int>(H_mat.rows()); }
};

/// Distance-dependent path loss zeta(d) = zeta0 * d^(-gamma) as a linear
/// power gain. zeta0 is given in dB.
inline double path_loss(double d, double gamma, double zeta0_db) {
  if (!(d > 0.0)) throw std::domain_error("path_loss: distance must be positive");
  return std::pow(10.0, zeta0_db / 10.0) * std::pow(d, -gamma);
}

/// Noise power sigma^2 in watts from the dBm figure in the config.
inline double noise_power_watts(const ScenarioConfig& cfg) {
  return std::pow(10.0, (cfg.noise_dbm - 30.0) / 10.0);
}

/// Transmit power budget P_t = sigma^2 * 10^(snr_db/10).
inline double transmit_power(const ScenarioConfig& cfg) {
  return noise_power_watts(cfg) * std::pow(10.0, cfg.snr_db / 10.0);
}

namespace detail {

/// Portable standard-normal sampler (Box-Muller on 53-bit uniforms) so that
/// channel draws are a reproducible function of the generator state across
/// standard library implementations.
class GaussianPairSampler {
 public:
  explicit GaussianPairSampler(std::uint64_t seed) : gen_(seed) {}

  /// One CN(0, variance) sample: real and imaginary parts each
  /// N(0, variance/2).
  Complex complex_normal(double variance) {
    const double u1 = uniform01_open();          // (0, 1]
    const double u2 = uniform01();               // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    const double s = std::sqrt(variance / 2.0);
    return {s * r * std::cos(phi), s * r * std::sin(phi)};
  }

 private:
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform01_open() { return 1.0 - uniform01(); }

  std::mt19937_64 gen_;
};

inline void fill_complex_normal(CMatrix& m, double variance,
                                GaussianPairSampler& sampler) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      m(i, j) = sampler.complex_normal(variance);
}

}  // namespace detail

/// Draws one Rayleigh-fading realization. Entries are i.i.d. circularly
/// symmetric complex Gaussian with per-entry variance equal to the link path
/// loss. Deterministic in (cfg.seed, trial_index): the sub-seed is
/// seed XOR trial_index, so trials can run in any order or in parallel.
/// Fill order is G, then H, then E, column-major.
inline ChannelSet sample_channels(const ScenarioConfig& cfg,
                                  std::uint64_t trial_index) {
  cfg.validate();
  detail::GaussianPairSampler sampler(cfg.seed ^ trial_index);
  ChannelSet ch;
  ch.G_mat.resize(cfg.L, cfg.K);
  ch.H_mat.resize(cfg.N, cfg.K);
  ch.E_mat.resize(cfg.N, cfg.L);
  detail::fill_complex_normal(ch.G_mat, path_loss(cfg.d_bu, cfg.gamma_bu, cfg.zeta0_db), sampler);
  detail::fill_complex_normal(ch.H_mat, path_loss(cfg.d_ru, cfg.gamma_ru, cfg.zeta0_db), sampler);
  detail::fill_complex_normal(ch.E_mat, path_loss(cfg.d_br, cfg.gamma_br, cfg.zeta0_db), sampler);
  ch.noise_power = noise_power_watts(cfg);
  return ch;
}

/// Effective BS-to-user channel F (L x K): column k is
/// f_k = g_k + (h_k^H Theta E)^H, i.e. F = G + E^H Theta^H H.
inline CMatrix effective_channel(const ChannelSet& ch, const CMatrix& theta) {
  const Eigen::Index n = ch.H_mat.rows();
  if (theta.rows() != n || theta.cols() != n)
    throw std::invalid_argument("effective_channel: theta must be N x N with N = " +
                                std::to_string(n));
  if (ch.E_mat.rows() != n || ch.E_mat.cols() != ch.G_mat.rows())
    throw std::invalid_argument("effective_channel: inconsistent channel dimensions");
  return ch.G_mat + ch.E_mat.adjoint() * theta.adjoint() * ch.H_mat;
}

}  // namespace bdris
