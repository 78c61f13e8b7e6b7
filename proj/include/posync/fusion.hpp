// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "posync/kalman.hpp"

namespace posync {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

enum class SyncMode { PosClock, PosSync };
enum class FilterKind { Ukf, Ekf };
enum class MeasurementSet { DoaToa, DoaOnly };

/// A filter variant: network synchronization assumption x update style x
/// which measurement rows are consumed.
struct FusionMode {
  SyncMode sync = SyncMode::PosClock;
  FilterKind kind = FilterKind::Ukf;
  MeasurementSet meas = MeasurementSet::DoaToa;

  std::string str() const;
  static FusionMode parse(const std::string& name);
};

/// Per-AN measurement triple in fixed row order (elevation theta, azimuth
/// phi, toa tau) with its 3x3 covariance.
struct EpochMeasurement {
  int an_id = -1;
  Eigen::Vector3d y = Eigen::Vector3d::Zero();
  Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
  double timestamp = 0.0;
};

struct FusionConfig {
  double sigma_v = 3.5;       ///< velocity process noise, m/s^(3/2)
  double sigma_eta = 1e-4;    ///< filter clock-skew process noise
  double sigma_rho = 1e-9;    ///< AN clock-offset random walk, s
  UtParams ut{1e-3, 2.0, 0.0};

  double init_vel_std = 5.0;        // m/s
  double init_offset_std = 100e-6;  // s
  double init_skew_mean = 25e-6;
  double init_skew_std = 30e-6;
  double init_pos_floor_std = 10.0;  // m
};

/// Shared geometric observation map: (elevation, azimuth, toa) of a user node
/// seen from an access node, with the clock-offset difference added to the
/// propagation delay. Both the simulator's ground-truth observables and the
/// fusion measurement prediction call this, so they agree bit-exactly.
/// Throws SingularGeometryError when the nodes are within epsilon_pos.
Eigen::Vector3d observation_geometry(const Eigen::Vector3d& un_position,
                                     const Eigen::Vector3d& an_position, double rho_an,
                                     double rho_un);

inline constexpr double kSingularPositionEps = 1e-6;  // meters

/// Transition over [p, v, rho_un, alpha, rho_slots...]: CV block, clock
/// offset/skew block, identity on AN offset slots; Q from sigma_v, the clock
/// block and sigma_rho^2 I. slot_count must be 0 in PosClock mode.
LinearTransition fusion_transition(SyncMode sync, double dt, double sigma_v, double sigma_eta,
                                   double sigma_rho, int slot_count);

/// Measurement prediction for one AN from a fusion state vector. an_slot is
/// the index into the offset block (state index 8 + slot), or -1 when the AN
/// carries no slot (synchronized network or the reference AN).
Eigen::Vector3d predict_measurement(const Vec& state, const Eigen::Vector3d& an_position,
                                    int an_slot);

/// Analytic 3 x n Jacobian of predict_measurement.
Mat measurement_jacobian(const Vec& state, int n, const Eigen::Vector3d& an_position,
                         int an_slot);

/// Centroid-localization position prior: mean = centroid of the LoS-AN
/// positions, isotropic variance = max squared centroid-to-AN distance
/// floored at floor_std^2. Returns (position, variance).
std::pair<Eigen::Vector3d, double> init_position_cl(
    const std::vector<Eigen::Vector3d>& los_an_positions, double floor_std = 10.0);

/// Remove departed AN slots (Gaussian marginalization: delete rows/columns)
/// and append arriving ANs with the configured prior and zero
/// cross-covariance. Slots are identified by `slots` (AN ids in state
/// order); returns the new state and slot list. Adding the reference AN is
/// an error.
std::pair<GaussianState, std::vector<int>> manage_an_set(const GaussianState& state,
                                                         const std::vector<int>& slots,
                                                         const std::vector<int>& new_los_ids,
                                                         int reference_an,
                                                         double offset_prior_std);

/// Joint 3D position + clock fusion filter over measurement epochs.
class FusionFilter {
 public:
  /// Initialize from the first epoch's LoS set: CL position prior, zero-mean
  /// velocity, configured clock priors; PosSync additionally opens offset
  /// slots for the non-reference LoS ANs.
  FusionFilter(FusionMode mode, FusionConfig cfg, int reference_an,
               const std::vector<int>& los_ids,
               const std::vector<Eigen::Vector3d>& los_positions);

  /// PosSync slot bookkeeping for a new LoS set (no-op in PosClock mode).
  /// The reference AN never receives a slot.
  void sync_an_slots(const std::vector<int>& los_ids);

  /// One epoch: linear predict then a single stacked update over all
  /// measurements (preceded by nothing if the list is empty). Epoch
  /// timestamps must be nondecreasing.
  void fuse_epoch(const std::vector<EpochMeasurement>& measurements,
                  const std::function<Eigen::Vector3d(int)>& an_position, double dt);

  const GaussianState& state() const { return state_; }
  FusionMode mode() const { return mode_; }
  const std::vector<int>& an_slots() const { return slots_; }

  Eigen::Vector3d position() const { return state_.mean.head<3>(); }
  Eigen::Vector3d velocity() const { return state_.mean.segment<3>(3); }
  double clock_offset() const { return state_.mean(6); }
  double clock_skew() const { return state_.mean(7); }
  std::optional<double> an_offset(int an_id) const;

 private:
  int slot_of(int an_id) const;  // -1 when absent

  FusionMode mode_;
  FusionConfig cfg_;
  int reference_an_;
  std::vector<int> slots_;
  GaussianState state_;
  double last_timestamp_ = -std::numeric_limits<double>::infinity();
};

}  // namespace posync
