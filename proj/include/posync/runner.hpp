// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include <map>
#include <string>
#include <vector>

#include "posync/config.hpp"

namespace posync {

/// Per-AN slice of an epoch record: truth clock offset and observables next
/// to whatever the stream measured or estimated for that AN. Angles are the
/// fusion-stage convention (elevation, azimuth) in radians, delays in
/// seconds.
struct PerAnRecord {
  int an_id = -1;
  double rho_true = 0.0;
  double rho_est = std::numeric_limits<double>::quiet_NaN();  // PosSync slots only
  double theta_true = 0.0, theta_meas = 0.0;
  double phi_true = 0.0, phi_meas = 0.0;
  double tau_true = 0.0, tau_meas = 0.0;
};

struct EpochRecord {
  int replication = 0;
  std::string mode;
  int epoch = 0;
  double t = 0.0;
  Eigen::Vector3d p_true = Eigen::Vector3d::Zero();
  Eigen::Vector3d p_est = Eigen::Vector3d::Zero();
  double rho_un_true = 0.0;
  double rho_un_est = 0.0;
  std::vector<PerAnRecord> ans;
};

/// Post-warm-up summary metrics for one filter mode in one replication.
/// Clock RMSEs are reported in nanoseconds; rmse_clock_an_ns is NaN for
/// modes without AN offset slots.
struct ModeMetrics {
  double rmse_3d = 0.0;
  double rmse_2d = 0.0;
  double rmse_z = 0.0;
  double rmse_clock_un_ns = 0.0;
  double rmse_clock_an_ns = std::numeric_limits<double>::quiet_NaN();
  std::map<int, Eigen::Vector3d> rmse_obs_per_an;  ///< (theta, phi, tau) meas-vs-truth
};

struct ReplicationResult {
  int replication = 0;
  std::uint64_t stream_hash = 0;
  std::map<std::string, ModeMetrics> metrics;
};

struct RunResult {
  nlohmann::json config_echo;
  std::vector<EpochRecord> records;
  std::vector<ReplicationResult> replications;
  std::map<std::string, ModeMetrics> median_metrics;
  std::map<std::string, ModeMetrics> mean_metrics;
};

/// Root-mean-square Euclidean error over the selected components for epochs
/// past the warm-up count.
double rmse(const std::vector<Eigen::Vector3d>& truth, const std::vector<Eigen::Vector3d>& est,
            const std::vector<int>& components, int warmup);
double rmse_scalar(const std::vector<double>& truth, const std::vector<double>& est, int warmup);

/// Execute the scenario: one shared measurement stream per replication, all
/// configured filter modes run against it, metrics per (replication, mode)
/// plus medians/means across replications.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Serialize results: epochs.csv (17 significant digits), summary.json and
/// config_echo.json under out_dir (created if missing).
void write_outputs(const RunResult& result, const std::string& out_dir);

/// In-memory renditions used by write_outputs (and by byte-identity tests).
std::string epochs_csv(const RunResult& result);
nlohmann::json summary_json(const RunResult& result);

}  // namespace posync
