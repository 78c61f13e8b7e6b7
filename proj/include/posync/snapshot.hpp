// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include <random>

#include "posync/eadf.hpp"

namespace posync {

/// One received multiantenna-multicarrier channel vector for a single beacon.
struct ChannelSnapshot {
  CVec g;                  ///< length element_count * subcarrier_count
  double noise_var = 0.0;  ///< per-complex-sample variance sigma_n^2
  int an_id = -1;
  double timestamp = 0.0;
};

/// g = B(theta, phi, tau) gamma + n with n complex-circular N(0, sigma_n^2 I).
/// SNR convention: ||B gamma||^2 / (dim * sigma_n^2).
ChannelSnapshot generate_snapshot(const Eadf& eadf, double colatitude, double azimuth,
                                  double tau, const Eigen::Vector2cd& gamma, double noise_var,
                                  std::mt19937_64& rng, int an_id = -1, double timestamp = 0.0);

}  // namespace posync
