// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "posync/clock.hpp"
#include "posync/fusion.hpp"
#include "posync/snapshot.hpp"

namespace posync {

/// One access node of the simulated network.
struct AnNode {
  int id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  ClockState clock;  // truth
  bool is_reference = false;
};

/// Rectangular lattice of ANs at the given spacing and height; the reference
/// AN is the lowest id (origin corner).
std::vector<AnNode> build_network(double spacing, double extent_x, double extent_y,
                                  double height);

/// Ground-truth user-node path sampled on the epoch grid.
struct Trajectory {
  enum class Kind { Vehicle, Drone, Line };
  Kind kind = Kind::Vehicle;
  double dt = 0.1;
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Vector3d> velocities;

  int size() const { return static_cast<int>(positions.size()); }
};

struct TrajectoryConfig {
  double v_max = 50.0 / 3.6;  // m/s
  double accel = 2.0;         // m/s^2
  double x_min = 5.0, x_max = 95.0, y_min = 5.0, y_max = 95.0;
  double z_vehicle = 1.5;
  double z_min = 0.0, z_max = 40.0;  // drone altitude band
  double waypoint_min_leg = 15.0;
  std::optional<Eigen::Vector3d> start;
  Eigen::Vector3d line_velocity = Eigen::Vector3d::Zero();  // Line kind
  double line_hold_s = 0.0;                                 // stationary hold before moving
};

/// Piecewise waypoint legs with trapezoidal speed profiles capped at v_max;
/// vehicles keep a constant z, drones include take-off, one scheduled
/// landing with a ground halt, and altitude variation. Deterministic per
/// seed. The Line kind holds still for line_hold_s and then moves at the
/// configured constant velocity.
Trajectory gen_trajectory(Trajectory::Kind kind, double duration, double dt,
                          const TrajectoryConfig& cfg, std::uint64_t seed);

/// Ids of the L nearest ANs by 3D distance, ties broken by lower id. L
/// larger than the network returns all ANs.
std::vector<int> select_los(const Eigen::Vector3d& un_position,
                            const std::vector<AnNode>& nodes, int l);

/// Ground-truth (elevation, azimuth, toa) including the truth clock-offset
/// difference; shares observation_geometry with the fusion stage.
Eigen::Vector3d true_observables(const Eigen::Vector3d& un_position, const AnNode& an,
                                 const ClockState& un_clock);

enum class MeasurementMode { Direct, Channel };
enum class AnClockScenario { Synchronized, PhaseLocked };

struct DirectNoise {
  double sigma_elevation = 1.0 * std::numbers::pi / 180.0;
  double sigma_azimuth = 1.0 * std::numbers::pi / 180.0;
  double sigma_toa = 3e-9;
};

/// Everything the simulator produced for one epoch.
struct WorldEpoch {
  int index = 0;
  double t = 0.0;
  Eigen::Vector3d un_position = Eigen::Vector3d::Zero();
  Eigen::Vector3d un_velocity = Eigen::Vector3d::Zero();
  ClockState un_clock;
  std::vector<int> los_ids;
  std::vector<Eigen::Vector3d> los_positions;
  std::vector<double> los_an_offsets;
  std::vector<Eigen::Vector3d> truth_obs;      ///< (elevation, azimuth, toa)
  std::vector<EpochMeasurement> measurements;  ///< direct mode
  std::vector<ChannelSnapshot> snapshots;      ///< channel mode
};

/// Steps the ground-truth world epoch by epoch and emits per-AN outputs in
/// the configured fidelity mode. Truth clocks advance once per epoch.
class World {
 public:
  World(std::vector<AnNode> nodes, Trajectory trajectory,
        const ClockTruthParams& un_clock_params, AnClockScenario an_scenario,
        MeasurementMode mode, int los_count, std::uint64_t seed, DirectNoise noise,
        double snr_db, const Eadf* eadf);

  bool done() const { return epoch_ >= trajectory_.size(); }
  WorldEpoch step();

  const std::vector<AnNode>& nodes() const { return nodes_; }
  int reference_an() const;

 private:
  std::vector<AnNode> nodes_;
  Trajectory trajectory_;
  ClockTruthParams un_params_;
  ClockTruthParams an_params_;  // degenerate: constant offsets
  MeasurementMode mode_;
  int los_count_;
  DirectNoise noise_;
  double snr_linear_;
  const Eadf* eadf_;
  ClockState un_clock_;
  std::mt19937_64 rng_;
  int epoch_ = 0;
};

}  // namespace posync
