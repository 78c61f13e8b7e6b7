// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/snapshot.hpp"

#include <cmath>
#include <stdexcept>

namespace posync {

ChannelSnapshot generate_snapshot(const Eadf& eadf, double colatitude, double azimuth,
                                  double tau, const Eigen::Vector2cd& gamma, double noise_var,
                                  std::mt19937_64& rng, int an_id, double timestamp) {
  if (!(noise_var >= 0.0)) {
    throw std::invalid_argument("generate_snapshot: noise variance must be >= 0");
  }
  const CMat b = polarimetric_response(eadf, colatitude, azimuth, tau);

  ChannelSnapshot snap;
  snap.g = b * gamma;
  snap.noise_var = noise_var;
  snap.an_id = an_id;
  snap.timestamp = timestamp;

  std::normal_distribution<double> n01(0.0, 1.0);
  const double component_std = std::sqrt(noise_var / 2.0);
  for (Eigen::Index i = 0; i < snap.g.size(); ++i) {
    const double re = n01(rng), im = n01(rng);
    snap.g(i) += std::complex<double>(component_std * re, component_std * im);
  }
  return snap;
}

}  // namespace posync
