// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "posync/angles.hpp"

namespace posync {

std::vector<AnNode> build_network(double spacing, double extent_x, double extent_y,
                                  double height) {
  if (!(spacing > 0.0)) throw std::invalid_argument("build_network: spacing must be > 0");
  if (extent_x < 0.0 || extent_y < 0.0) {
    throw std::invalid_argument("build_network: negative extent");
  }
  const int nx = static_cast<int>(std::floor(extent_x / spacing + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor(extent_y / spacing + 1e-9)) + 1;

  std::vector<AnNode> nodes;
  nodes.reserve(static_cast<std::size_t>(nx) * ny);
  int id = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      AnNode node;
      node.id = id;
      node.position = Eigen::Vector3d(i * spacing, j * spacing, height);
      node.is_reference = (id == 0);
      nodes.push_back(node);
      ++id;
    }
  }
  return nodes;
}

namespace {

Eigen::Vector2d random_point(const TrajectoryConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(cfg.x_min, cfg.x_max);
  std::uniform_real_distribution<double> uy(cfg.y_min, cfg.y_max);
  return {ux(rng), uy(rng)};
}

Eigen::Vector2d pick_waypoint(const Eigen::Vector2d& from, const TrajectoryConfig& cfg,
                              std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Eigen::Vector2d p = random_point(cfg, rng);
    if ((p - from).norm() >= cfg.waypoint_min_leg) return p;
  }
  // Area smaller than the minimum leg; take whatever came last.
  return random_point(cfg, rng);
}

Trajectory gen_line(double duration, double dt, const TrajectoryConfig& cfg) {
  if (cfg.line_velocity.norm() > cfg.v_max + 1e-12) {
    throw std::invalid_argument("gen_trajectory: line velocity exceeds v_max");
  }
  const Eigen::Vector3d start = cfg.start.value_or(Eigen::Vector3d(20.0, 15.0, cfg.z_vehicle));
  Trajectory traj;
  traj.kind = Trajectory::Kind::Line;
  traj.dt = dt;
  const int count = static_cast<int>(std::llround(duration / dt)) + 1;
  for (int k = 0; k < count; ++k) {
    const double t = k * dt;
    const double moving = std::max(0.0, t - cfg.line_hold_s);
    traj.positions.push_back(start + moving * cfg.line_velocity);
    traj.velocities.push_back(t >= cfg.line_hold_s ? cfg.line_velocity
                                                   : Eigen::Vector3d::Zero());
  }
  return traj;
}

}  // namespace

Trajectory gen_trajectory(Trajectory::Kind kind, double duration, double dt,
                          const TrajectoryConfig& cfg, std::uint64_t seed) {
  if (!(duration > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("gen_trajectory: duration and dt must be > 0");
  }
  if (!(cfg.v_max > 0.0) || !(cfg.accel > 0.0)) {
    throw std::invalid_argument("gen_trajectory: v_max and accel must be > 0");
  }
  if (kind == Trajectory::Kind::Line) return gen_line(duration, dt, cfg);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const bool drone = (kind == Trajectory::Kind::Drone);
  const int count = static_cast<int>(std::llround(duration / dt)) + 1;

  Eigen::Vector3d pos;
  if (cfg.start) {
    pos = *cfg.start;
  } else {
    const Eigen::Vector2d xy = random_point(cfg, rng);
    pos = Eigen::Vector3d(xy.x(), xy.y(), drone ? cfg.z_min : cfg.z_vehicle);
  }
  if (!drone) pos.z() = cfg.z_vehicle;

  auto pick_target = [&](bool landing) {
    const Eigen::Vector2d xy = pick_waypoint(pos.head<2>(), cfg, rng);
    double z = cfg.z_vehicle;
    if (drone) {
      if (landing) {
        z = cfg.z_min;
      } else {
        std::uniform_real_distribution<double> uz(std::min(cfg.z_min + 2.0, cfg.z_max),
                                                  cfg.z_max);
        z = uz(rng);
      }
    }
    return Eigen::Vector3d(xy.x(), xy.y(), z);
  };

  double halt_left = drone ? 1.0 : 0.0;  // drones start grounded
  bool landing_done = false;
  bool next_is_landing = false;
  Eigen::Vector3d target = pick_target(false);
  double cruise = (0.5 + 0.5 * u01(rng)) * cfg.v_max;
  double speed = 0.0;

  Trajectory traj;
  traj.kind = kind;
  traj.dt = dt;
  traj.positions.reserve(static_cast<std::size_t>(count));
  traj.velocities.reserve(static_cast<std::size_t>(count));
  traj.positions.push_back(pos);
  traj.velocities.push_back(Eigen::Vector3d::Zero());

  for (int k = 1; k < count; ++k) {
    Eigen::Vector3d vel = Eigen::Vector3d::Zero();
    if (halt_left > 0.0) {
      halt_left -= dt;
      speed = 0.0;
    } else {
      const Eigen::Vector3d to_target = target - pos;
      const double remaining = to_target.norm();
      const double corner = std::min(3.0, cruise);
      // Fastest speed from which the corner speed is reachable in `remaining`.
      const double brake_limit =
          std::sqrt(corner * corner + 2.0 * cfg.accel * std::max(remaining, 0.0));
      const double setpoint = std::min({cruise, brake_limit, cfg.v_max});
      const double delta = std::clamp(setpoint - speed, -cfg.accel * dt, cfg.accel * dt);
      speed = std::clamp(speed + delta, 0.0, cfg.v_max);

      if (remaining <= speed * dt || remaining < 1e-9) {
        pos = target;
        const bool arrived_at_landing = next_is_landing;
        if (arrived_at_landing) {
          landing_done = true;
          next_is_landing = false;
          halt_left = 1.5;  // ground halt after landing
          speed = 0.0;
        }
        next_is_landing = drone && !landing_done && (k * dt > 0.45 * duration);
        target = pick_target(next_is_landing);
        if (next_is_landing) target.head<2>() = pos.head<2>();  // land in place
        cruise = (0.5 + 0.5 * u01(rng)) * cfg.v_max;
      } else {
        const Eigen::Vector3d dir = to_target / remaining;
        vel = dir * speed;
        pos += vel * dt;
      }
    }
    traj.positions.push_back(pos);
    traj.velocities.push_back(vel);
  }
  return traj;
}

std::vector<int> select_los(const Eigen::Vector3d& un_position,
                            const std::vector<AnNode>& nodes, int l) {
  if (l < 0) throw std::invalid_argument("select_los: negative L");
  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(nodes.size());
  for (const auto& node : nodes) {
    ranked.emplace_back((un_position - node.position).squaredNorm(), node.id);
  }
  std::sort(ranked.begin(), ranked.end());
  const int take = std::min<int>(l, static_cast<int>(ranked.size()));
  std::vector<int> ids(static_cast<std::size_t>(take));
  for (int i = 0; i < take; ++i) ids[static_cast<std::size_t>(i)] = ranked[i].second;
  return ids;
}

Eigen::Vector3d true_observables(const Eigen::Vector3d& un_position, const AnNode& an,
                                 const ClockState& un_clock) {
  return observation_geometry(un_position, an.position, an.clock.offset, un_clock.offset);
}

World::World(std::vector<AnNode> nodes, Trajectory trajectory,
             const ClockTruthParams& un_clock_params, AnClockScenario an_scenario,
             MeasurementMode mode, int los_count, std::uint64_t seed, DirectNoise noise,
             double snr_db, const Eadf* eadf)
    : nodes_(std::move(nodes)),
      trajectory_(std::move(trajectory)),
      un_params_(un_clock_params),
      mode_(mode),
      los_count_(los_count),
      noise_(noise),
      snr_linear_(std::pow(10.0, snr_db / 10.0)),
      eadf_(eadf),
      rng_(seed) {
  if (nodes_.empty()) throw std::invalid_argument("World: empty network");
  if (mode_ == MeasurementMode::Channel && eadf_ == nullptr) {
    throw std::invalid_argument("World: channel mode requires an EADF");
  }
  if (noise_.sigma_elevation < 0.0 || noise_.sigma_azimuth < 0.0 || noise_.sigma_toa < 0.0) {
    throw std::invalid_argument("World: negative measurement noise std");
  }

  // Phase-locked ANs keep constant offsets relative to the reference AN;
  // synchronized ANs have zero offsets. Either way the AN truth clock does
  // not wander.
  an_params_ = ClockTruthParams{1.0, 0.0, un_params_.init_offset_std, 0.0, 0.0};
  un_clock_ = sample_initial_clock(un_params_, rng_);
  if (an_scenario == AnClockScenario::PhaseLocked) {
    std::normal_distribution<double> n01(0.0, 1.0);
    for (auto& node : nodes_) {
      node.clock.skew = 0.0;
      node.clock.offset = node.is_reference ? 0.0 : an_params_.init_offset_std * n01(rng_);
    }
  }
}

int World::reference_an() const {
  for (const auto& node : nodes_) {
    if (node.is_reference) return node.id;
  }
  return nodes_.front().id;
}

WorldEpoch World::step() {
  if (done()) throw std::logic_error("World::step past the end of the trajectory");
  const int k = epoch_++;
  const double dt = trajectory_.dt;

  if (k > 0) {
    un_clock_ = step_clock(un_clock_, dt, un_params_, rng_);
    for (auto& node : nodes_) node.clock = step_clock(node.clock, dt, an_params_, rng_);
  }

  WorldEpoch ep;
  ep.index = k;
  ep.t = k * dt;
  ep.un_position = trajectory_.positions[static_cast<std::size_t>(k)];
  ep.un_velocity = trajectory_.velocities[static_cast<std::size_t>(k)];
  ep.un_clock = un_clock_;
  ep.los_ids = select_los(ep.un_position, nodes_, los_count_);

  std::normal_distribution<double> n01(0.0, 1.0);
  for (int id : ep.los_ids) {
    const AnNode& an = nodes_[static_cast<std::size_t>(id)];
    ep.los_positions.push_back(an.position);
    ep.los_an_offsets.push_back(an.clock.offset);
    const Eigen::Vector3d truth = true_observables(ep.un_position, an, un_clock_);
    ep.truth_obs.push_back(truth);

    if (mode_ == MeasurementMode::Direct) {
      EpochMeasurement meas;
      meas.an_id = id;
      meas.timestamp = ep.t;
      meas.y(0) = truth(0) + noise_.sigma_elevation * n01(rng_);
      meas.y(1) = wrap_angle(truth(1) + noise_.sigma_azimuth * n01(rng_));
      meas.y(2) = truth(2) + noise_.sigma_toa * n01(rng_);
      meas.r = Eigen::Vector3d(noise_.sigma_elevation * noise_.sigma_elevation,
                               noise_.sigma_azimuth * noise_.sigma_azimuth,
                               noise_.sigma_toa * noise_.sigma_toa)
                   .asDiagonal();
      ep.measurements.push_back(meas);
    } else {
      const double tau_prop = (ep.un_position - an.position).norm() / kSpeedOfLight;
      const double colat = colatitude_from_elevation(truth(0));
      // Unit-power complex-circular path weights: E||gamma||^2 = 1.
      Eigen::Vector2cd gamma;
      gamma << std::complex<double>(0.5 * n01(rng_), 0.5 * n01(rng_)),
          std::complex<double>(0.5 * n01(rng_), 0.5 * n01(rng_));
      const CMat b = polarimetric_response(*eadf_, colat, truth(1), tau_prop);
      const double signal_power = (b * gamma).squaredNorm();
      const double noise_var =
          signal_power / (static_cast<double>(eadf_->channel_dim()) * snr_linear_);
      ep.snapshots.push_back(generate_snapshot(*eadf_, colat, truth(1), tau_prop, gamma,
                                               noise_var, rng_, id, ep.t));
    }
  }
  return ep;
}

}  // namespace posync
