#pragma once

// Shared helpers for the test suite: deterministic random matrices and
// unit-scale channel sets (the library's own sampler produces path-loss
// scale entries, which is the wrong regime for some numerical checks).

#include <cstdint>

#include "bdris/channel.hpp"

namespace testsupport {

inline bdris::CMatrix random_cmatrix(int rows, int cols, std::uint64_t seed,
                                     double variance = 1.0) {
  bdris::detail::GaussianPairSampler sampler(seed);
  bdris::CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      m(i, j) = sampler.complex_normal(variance);
    }
  }
  return m;
}

// Channel set with unit-variance entries and configurable noise power.
inline bdris::ChannelSet unit_channelset(int l, int k, int n,
                                         std::uint64_t seed,
                                         double noise_power = 1.0) {
  bdris::detail::GaussianPairSampler sampler(seed);
  bdris::ChannelSet ch;
  ch.G_mat.resize(l, k);
  ch.H_mat.resize(n, k);
  ch.E_mat.resize(n, l);
  bdris::detail::fill_complex_normal(ch.G_mat, 1.0, sampler);
  bdris::detail::fill_complex_normal(ch.H_mat, 1.0, sampler);
  bdris::detail::fill_complex_normal(ch.E_mat, 1.0, sampler);
  ch.noise_power = noise_power;
  return ch;
}

}  // namespace testsupport
