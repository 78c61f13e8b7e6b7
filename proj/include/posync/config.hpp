// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "posync/scenario.hpp"
#include "posync/tracker.hpp"

namespace posync {

/// Configuration problem with a path-to-field diagnostic; maps to CLI exit
/// code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NetworkConfig {
  double spacing = 50.0;
  double extent_x = 100.0;
  double extent_y = 100.0;
  double height = 7.0;
};

struct ChannelConfig {
  double snr_db = 20.0;
  double carrier_hz = 6e9;
  double subcarrier_spacing_hz = 240e3;
  int subcarrier_count = 19;
  int modes_azimuth = 15;
  int modes_elevation = 15;
  int grid_azimuth = 64;
  int grid_elevation = 64;
  int elements_per_ring = 5;
};

/// Full scenario description. Default-constructed values reproduce the
/// reference setup: 0.1 s epochs, two fused LoS ANs, 50 m grid spacing at
/// 7 m height, sigma_v = 3.5 m/s, filter sigma_eta = 1e-4, truth sigma_eta =
/// 6.3e-8, clock init 100 us / 25 ppm / 30 ppm, UT (1e-3, 2, 0).
struct ScenarioConfig {
  std::uint64_t seed = 1;
  int replications = 20;
  int threads = 0;  ///< 0 = hardware concurrency
  double duration_s = 60.0;
  double epoch_dt_s = 0.1;
  int warmup_epochs = 50;
  std::vector<std::string> modes = {"posclock_ukf",         "posclock_ekf", "possync_ukf",
                                    "possync_ekf",          "posclock_ukf_doaonly",
                                    "posclock_ekf_doaonly"};

  NetworkConfig network;
  int los_count = 2;
  std::string an_clock_scenario = "synchronized";  // or "phase_locked"
  ClockTruthParams clock_truth;

  std::string measurement_mode = "direct";  // or "channel"
  DirectNoise direct_noise;
  ChannelConfig channel;
  TrackerConfig stage1;

  FusionConfig fusion;
  std::string fusion_r_source = "stage1";  // or "configured"

  std::string trajectory_kind = "vehicle";  // vehicle | drone | line
  TrajectoryConfig trajectory;
};

/// Parse with defaults for absent fields; unknown keys, type mismatches and
/// range violations raise ConfigError with the JSON path of the offender.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig parse_config_file(const std::string& path);

/// Fully-resolved echo of a config (all defaults materialized).
nlohmann::json config_to_json(const ScenarioConfig& cfg);

/// Human/machine readable schema: per-field type, default and description.
nlohmann::json config_schema();

}  // namespace posync
