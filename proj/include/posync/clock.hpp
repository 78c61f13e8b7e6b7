// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include <random>
#include <utility>

#include "posync/types.hpp"

namespace posync {

/// Oscillator error state: additive time offset rho (seconds) and its drift
/// rate alpha (dimensionless, e.g. 25 ppm = 25e-6).
struct ClockState {
  double offset = 0.0;
  double skew = 0.0;
};

/// Truth-simulation parameters for the clock random walk
///   alpha[k] = beta alpha[k-1] + eta[k],  eta ~ N(0, sigma_eta^2)
///   rho[k]   = rho[k-1] + alpha[k] dt
/// and the initial offset/skew draw.
struct ClockTruthParams {
  double beta = 1.0 - 1e-9;
  double sigma_eta = 6.3e-8;
  double init_offset_std = 100e-6;  // seconds
  double init_skew_mean = 25e-6;
  double init_skew_std = 30e-6;
};

/// One clock step over dt seconds: skew updated first, then the offset
/// integrates the updated skew.
ClockState step_clock(const ClockState& c, double dt, const ClockTruthParams& p,
                      std::mt19937_64& rng);

/// Draw an initial clock state from the configured offset/skew distributions.
ClockState sample_initial_clock(const ClockTruthParams& p, std::mt19937_64& rng);

/// Process-noise blocks used by the fusion filters:
///   Q' = sigma_eta^2 [[dt^3/3, dt^2/2], [dt^2/2, dt]]   (offset, skew)
///   Q_rho = sigma_rho^2 I_L                              (per-AN offsets)
std::pair<Eigen::Matrix2d, Mat> clock_process_blocks(double dt, double sigma_eta,
                                                     double sigma_rho, int slot_count);

}  // namespace posync
