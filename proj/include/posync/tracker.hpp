// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include "posync/kalman.hpp"
#include "posync/snapshot.hpp"

namespace posync {

/// Tuning for the per-AN tracker over the state
/// [tau, azimuth, colatitude, d tau, d azimuth, d colatitude].
struct TrackerConfig {
  double sigma_tau_rate = 1e-8;     ///< rate-of-change process noise, s / s^(3/2)
  double sigma_azimuth_rate = 0.1;  ///< rad / s^(3/2)
  double sigma_colat_rate = 0.1;
  double lambda_override = 24.0;  ///< sigma-point spread sqrt(lambda + n)
  double ut_beta = 2.0;
  int gn_iters = 3;  ///< iterated sigma-point refinements per snapshot

  int init_tau_grid = 64;
  int init_azimuth_grid = 36;
  int init_colat_grid = 18;
  double matched_power_threshold = 0.25;  ///< low-power init flag level

  double init_rate_std_tau = 5e-8;
  double init_rate_std_angle = 0.3;

  double divergence_nees_threshold = 3.0;
  int divergence_epochs = 3;

  /// UT parameters realizing lambda_override: alpha = 1, kappa = lambda.
  UtParams ut_params() const { return UtParams{1.0, ut_beta, lambda_override}; }
};

/// Constant-velocity transition for the 6-state tracker:
/// F = [[I3, dt I3], [0, I3]], Q from D = diag(sigma_tau^2, sigma_az^2,
/// sigma_colat^2) as [[dt^3 D/3, dt^2 D/2], [dt^2 D/2, dt D]].
LinearTransition tracker_transition(double dt, double sigma_tau_rate, double sigma_azimuth_rate,
                                    double sigma_colat_rate);

/// Matched-power grid initialization output.
struct TrackerInit {
  GaussianState state;
  double matched_power_ratio = 0.0;  ///< ||B pinv g||^2 / ||g||^2 at the argmax
  bool low_power = false;            ///< ratio below the configured threshold
  Eigen::Vector3d grid_cell;         ///< (tau, azimuth, colatitude) cell sizes
};

/// Grid search over (tau, azimuth, colatitude) maximizing the conditional
/// least-squares matched power of the snapshot; rates start at zero and the
/// initial covariance diagonal comes from the grid cell sizes.
TrackerInit init_tracker(const ChannelSnapshot& snapshot, const Eadf& eadf,
                         const TrackerConfig& cfg);

/// Per-epoch estimate handed to the fusion stage. Covariance is the marginal
/// over (colatitude, azimuth, tau) in that row order.
struct TrackerEstimate {
  double azimuth = 0.0;
  double colatitude = 0.0;
  double toa = 0.0;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double innovation_nees = 0.0;
};

/// Tracks ToA and DoA of the strongest propagation path from channel
/// snapshots: linear predict, then iterated sigma-point updates against the
/// stacked real/imaginary channel vector with per-sigma-point conditional
/// least-squares path weights. Sigma points are mapped to the feasible
/// region (azimuth wrapped, colatitude reflected) before evaluating the
/// channel model.
class DoaToaTracker {
 public:
  DoaToaTracker(const Eadf& eadf, TrackerConfig cfg);

  /// Grid-search initialization from the first snapshot.
  TrackerInit initialize(const ChannelSnapshot& snapshot);

  bool initialized() const { return initialized_; }

  TrackerEstimate step(const ChannelSnapshot& snapshot, double dt);

  const GaussianState& state() const { return state_; }

  /// True after the innovation NEES stayed above threshold for the configured
  /// number of consecutive epochs; caller should re-initialize.
  bool needs_reinit() const { return needs_reinit_; }

 private:
  const Eadf* eadf_;
  TrackerConfig cfg_;
  GaussianState state_;
  bool initialized_ = false;
  bool needs_reinit_ = false;
  int high_nees_streak_ = 0;
};

}  // namespace posync
