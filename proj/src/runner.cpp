// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/runner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "posync/angles.hpp"

namespace posync {

namespace {

constexpr int kCsvSchemaVersion = 1;

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct Fnv1a {
  std::uint64_t h = 1469598103934665603ull;
  void bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  }
  void add(double v) { bytes(&v, sizeof v); }
  void add(int v) { bytes(&v, sizeof v); }
};

/// Everything every filter mode consumes for one epoch, plus the truth the
/// metrics compare against.
struct StreamEpoch {
  int index = 0;
  double t = 0.0;
  Eigen::Vector3d p_true = Eigen::Vector3d::Zero();
  double rho_un_true = 0.0;
  std::vector<int> los_ids;
  std::vector<Eigen::Vector3d> los_positions;
  std::vector<double> an_offsets;
  std::vector<Eigen::Vector3d> truth_obs;  // (elevation, azimuth, toa)
  std::vector<EpochMeasurement> meas;
};

struct Stream {
  std::vector<StreamEpoch> epochs;
  std::uint64_t hash = 0;
  int reference_an = 0;
  std::vector<Eigen::Vector3d> an_positions;  // indexed by AN id
};

Trajectory::Kind parse_kind(const std::string& kind) {
  if (kind == "vehicle") return Trajectory::Kind::Vehicle;
  if (kind == "drone") return Trajectory::Kind::Drone;
  return Trajectory::Kind::Line;
}

/// Stage-1 estimate (tracker angle convention) to a fusion measurement:
/// elevation = pi/2 - colatitude flips the sign of the theta row, so the
/// covariance cross terms flip with it.
EpochMeasurement bridge_estimate(int an_id, double t, double azimuth, double colatitude,
                                 double toa, const Eigen::Matrix3d& cov_theta_phi_tau) {
  EpochMeasurement meas;
  meas.an_id = an_id;
  meas.timestamp = t;
  meas.y = Eigen::Vector3d(elevation_from_colatitude(colatitude), wrap_angle(azimuth), toa);
  const Eigen::Vector3d flip(-1.0, 1.0, 1.0);
  meas.r = flip.asDiagonal() * cov_theta_phi_tau * flip.asDiagonal();
  return meas;
}

Stream simulate_stream(const ScenarioConfig& cfg, const Eadf* eadf, int rep) {
  const auto nodes = build_network(cfg.network.spacing, cfg.network.extent_x,
                                   cfg.network.extent_y, cfg.network.height);
  const auto trajectory =
      gen_trajectory(parse_kind(cfg.trajectory_kind), cfg.duration_s, cfg.epoch_dt_s,
                     cfg.trajectory, mix_seed(cfg.seed, 2ull * rep));
  const auto mode = (cfg.measurement_mode == "channel") ? MeasurementMode::Channel
                                                        : MeasurementMode::Direct;
  const auto an_scenario = (cfg.an_clock_scenario == "phase_locked")
                               ? AnClockScenario::PhaseLocked
                               : AnClockScenario::Synchronized;
  World world(nodes, trajectory, cfg.clock_truth, an_scenario, mode, cfg.los_count,
              mix_seed(cfg.seed, 2ull * rep + 1), cfg.direct_noise, cfg.channel.snr_db, eadf);

  Stream stream;
  stream.reference_an = world.reference_an();
  stream.an_positions.reserve(nodes.size());
  for (const auto& node : nodes) stream.an_positions.push_back(node.position);

  // Channel mode: one tracker per LoS AN, re-created whenever the AN
  // re-enters the LoS set or the divergence detector fires.
  std::map<int, DoaToaTracker> trackers;
  std::vector<int> previous_los;

  while (!world.done()) {
    WorldEpoch ep = world.step();
    StreamEpoch se;
    se.index = ep.index;
    se.t = ep.t;
    se.p_true = ep.un_position;
    se.rho_un_true = ep.un_clock.offset;
    se.los_ids = ep.los_ids;
    se.los_positions = ep.los_positions;
    se.an_offsets = ep.los_an_offsets;
    se.truth_obs = ep.truth_obs;

    if (mode == MeasurementMode::Direct) {
      se.meas = ep.measurements;
    } else {
      for (const auto& snap : ep.snapshots) {
        const bool was_los = std::find(previous_los.begin(), previous_los.end(), snap.an_id) !=
                             previous_los.end();
        auto it = trackers.find(snap.an_id);
        if (it == trackers.end()) {
          it = trackers.emplace(snap.an_id, DoaToaTracker(*eadf, cfg.stage1)).first;
        }
        DoaToaTracker& tracker = it->second;

        double az, colat, toa;
        Eigen::Matrix3d cov;
        if (!was_los || !tracker.initialized()) {
          const TrackerInit init = tracker.initialize(snap);
          az = init.state.mean(1);
          colat = init.state.mean(2);
          toa = init.state.mean(0);
          const std::array<int, 3> order = {2, 1, 0};
          for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) cov(i, j) = init.state.cov(order[i], order[j]);
          }
        } else {
          TrackerEstimate est = tracker.step(snap, cfg.epoch_dt_s);
          if (tracker.needs_reinit()) {
            const TrackerInit init = tracker.initialize(snap);
            est.azimuth = init.state.mean(1);
            est.colatitude = init.state.mean(2);
            est.toa = init.state.mean(0);
            const std::array<int, 3> order = {2, 1, 0};
            for (int i = 0; i < 3; ++i) {
              for (int j = 0; j < 3; ++j) est.cov(i, j) = init.state.cov(order[i], order[j]);
            }
          }
          az = est.azimuth;
          colat = est.colatitude;
          toa = est.toa;
          cov = est.cov;
        }
        if (cfg.fusion_r_source == "configured") {
          cov = Eigen::Vector3d(cfg.direct_noise.sigma_elevation * cfg.direct_noise.sigma_elevation,
                                cfg.direct_noise.sigma_azimuth * cfg.direct_noise.sigma_azimuth,
                                cfg.direct_noise.sigma_toa * cfg.direct_noise.sigma_toa)
                    .asDiagonal();
          // already in (theta, phi, tau) order with no cross terms; the
          // bridge's sign flip is a no-op on a diagonal.
        }
        se.meas.push_back(bridge_estimate(snap.an_id, ep.t, az, colat, toa, cov));
      }
      previous_los = ep.los_ids;
    }
    stream.epochs.push_back(std::move(se));
  }

  Fnv1a fnv;
  for (const auto& se : stream.epochs) {
    fnv.add(se.index);
    for (int id : se.los_ids) fnv.add(id);
    for (const auto& m : se.meas) {
      fnv.add(m.an_id);
      fnv.add(m.timestamp);
      for (int i = 0; i < 3; ++i) fnv.add(m.y(i));
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) fnv.add(m.r(i, j));
      }
    }
  }
  stream.hash = fnv.h;
  return stream;
}

std::vector<EpochRecord> run_mode(const ScenarioConfig& cfg, const Stream& stream,
                                  const std::string& mode_name, int rep) {
  const FusionMode mode = FusionMode::parse(mode_name);
  const StreamEpoch& first = stream.epochs.front();
  FusionFilter filter(mode, cfg.fusion, stream.reference_an, first.los_ids,
                      first.los_positions);
  const auto an_position = [&stream](int id) {
    return stream.an_positions[static_cast<std::size_t>(id)];
  };

  std::vector<EpochRecord> records;
  records.reserve(stream.epochs.size());
  for (const auto& se : stream.epochs) {
    filter.sync_an_slots(se.los_ids);
    filter.fuse_epoch(se.meas, an_position, cfg.epoch_dt_s);

    EpochRecord rec;
    rec.replication = rep;
    rec.mode = mode_name;
    rec.epoch = se.index;
    rec.t = se.t;
    rec.p_true = se.p_true;
    rec.p_est = filter.position();
    rec.rho_un_true = se.rho_un_true;
    rec.rho_un_est = filter.clock_offset();
    for (std::size_t i = 0; i < se.los_ids.size(); ++i) {
      PerAnRecord an;
      an.an_id = se.los_ids[i];
      an.rho_true = se.an_offsets[i];
      if (const auto est = filter.an_offset(an.an_id)) an.rho_est = *est;
      an.theta_true = se.truth_obs[i](0);
      an.phi_true = se.truth_obs[i](1);
      an.tau_true = se.truth_obs[i](2);
      an.theta_meas = se.meas[i].y(0);
      an.phi_meas = se.meas[i].y(1);
      an.tau_meas = se.meas[i].y(2);
      rec.ans.push_back(an);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

double nan_aware_median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  for (double v : values) {
    if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double nan_aware_mean(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
    sum += v;
  }
  return sum / static_cast<double>(values.size());
}

ModeMetrics compute_metrics(const std::vector<const EpochRecord*>& records, int warmup) {
  std::vector<Eigen::Vector3d> p_true, p_est;
  std::vector<double> rho_true, rho_est;
  for (const auto* rec : records) {
    p_true.push_back(rec->p_true);
    p_est.push_back(rec->p_est);
    rho_true.push_back(rec->rho_un_true);
    rho_est.push_back(rec->rho_un_est);
  }

  ModeMetrics metrics;
  metrics.rmse_3d = rmse(p_true, p_est, {0, 1, 2}, warmup);
  metrics.rmse_2d = rmse(p_true, p_est, {0, 1}, warmup);
  metrics.rmse_z = rmse(p_true, p_est, {2}, warmup);
  metrics.rmse_clock_un_ns = 1e9 * rmse_scalar(rho_true, rho_est, warmup);

  double an_sq = 0.0;
  int an_count = 0;
  std::map<int, std::array<double, 4>> obs;  // sum of squares (theta, phi, tau) + count
  for (const auto* rec : records) {
    if (rec->epoch < warmup) continue;
    for (const auto& an : rec->ans) {
      if (!std::isnan(an.rho_est)) {
        const double e = an.rho_est - an.rho_true;
        an_sq += e * e;
        ++an_count;
      }
      auto& acc = obs[an.an_id];
      const double de = an.theta_meas - an.theta_true;
      const double da = wrap_angle(an.phi_meas - an.phi_true);
      const double dt = an.tau_meas - an.tau_true;
      acc[0] += de * de;
      acc[1] += da * da;
      acc[2] += dt * dt;
      acc[3] += 1.0;
    }
  }
  if (an_count > 0) metrics.rmse_clock_an_ns = 1e9 * std::sqrt(an_sq / an_count);
  for (const auto& [id, acc] : obs) {
    metrics.rmse_obs_per_an[id] = Eigen::Vector3d(
        std::sqrt(acc[0] / acc[3]), std::sqrt(acc[1] / acc[3]), std::sqrt(acc[2] / acc[3]));
  }
  return metrics;
}

ModeMetrics aggregate(const std::vector<const ModeMetrics*>& reps, bool median) {
  const auto agg = [median](std::vector<double> v) {
    return median ? nan_aware_median(std::move(v)) : nan_aware_mean(v);
  };
  ModeMetrics out;
  std::vector<double> v3, v2, vz, vcu, vca;
  for (const auto* m : reps) {
    v3.push_back(m->rmse_3d);
    v2.push_back(m->rmse_2d);
    vz.push_back(m->rmse_z);
    vcu.push_back(m->rmse_clock_un_ns);
    vca.push_back(m->rmse_clock_an_ns);
  }
  out.rmse_3d = agg(v3);
  out.rmse_2d = agg(v2);
  out.rmse_z = agg(vz);
  out.rmse_clock_un_ns = agg(vcu);
  out.rmse_clock_an_ns = agg(vca);

  std::set<int> an_ids;
  for (const auto* m : reps) {
    for (const auto& [id, v] : m->rmse_obs_per_an) an_ids.insert(id);
  }
  for (int id : an_ids) {
    Eigen::Vector3d combined;
    for (int c = 0; c < 3; ++c) {
      std::vector<double> vals;
      for (const auto* m : reps) {
        const auto it = m->rmse_obs_per_an.find(id);
        if (it != m->rmse_obs_per_an.end()) vals.push_back(it->second(c));
      }
      combined(c) = agg(vals);
    }
    out.rmse_obs_per_an[id] = combined;
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json metrics_to_json(const ModeMetrics& m) {
  nlohmann::json j{{"rmse_3d_m", m.rmse_3d},
                   {"rmse_2d_m", m.rmse_2d},
                   {"rmse_z_m", m.rmse_z},
                   {"rmse_clock_un_ns", m.rmse_clock_un_ns},
                   {"rmse_clock_an_ns", m.rmse_clock_an_ns}};
  nlohmann::json obs = nlohmann::json::object();
  for (const auto& [id, v] : m.rmse_obs_per_an) {
    obs[std::to_string(id)] = {{"theta_rad", v(0)}, {"phi_rad", v(1)}, {"tau_s", v(2)}};
  }
  j["rmse_obs_per_an"] = std::move(obs);
  return j;
}

}  // namespace

double rmse(const std::vector<Eigen::Vector3d>& truth, const std::vector<Eigen::Vector3d>& est,
            const std::vector<int>& components, int warmup) {
  if (truth.size() != est.size()) throw std::invalid_argument("rmse: series length mismatch");
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = static_cast<std::size_t>(std::max(warmup, 0)); k < truth.size(); ++k) {
    for (int c : components) {
      const double e = est[k](c) - truth[k](c);
      sum += e * e;
    }
    ++count;
  }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(sum / count);
}

double rmse_scalar(const std::vector<double>& truth, const std::vector<double>& est,
                   int warmup) {
  if (truth.size() != est.size()) throw std::invalid_argument("rmse: series length mismatch");
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = static_cast<std::size_t>(std::max(warmup, 0)); k < truth.size(); ++k) {
    const double e = est[k] - truth[k];
    sum += e * e;
    ++count;
  }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(sum / count);
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  RunResult result;
  result.config_echo = config_to_json(cfg);

  // The EADF is a per-array one-time setup shared by every replication.
  Eadf eadf;
  const bool channel = (cfg.measurement_mode == "channel");
  if (channel) {
    const double wavelength = kSpeedOfLight / cfg.channel.carrier_hz;
    const auto geometry =
        ArrayGeometry::cylindrical(wavelength, cfg.channel.elements_per_ring);
    eadf = synthesize_eadf(geometry, cfg.channel.modes_azimuth, cfg.channel.modes_elevation,
                           cfg.channel.grid_azimuth, cfg.channel.grid_elevation,
                           cfg.channel.subcarrier_spacing_hz, cfg.channel.subcarrier_count);
  }

  struct RepOutput {
    ReplicationResult summary;
    std::vector<EpochRecord> records;
  };
  std::vector<RepOutput> outputs(static_cast<std::size_t>(cfg.replications));

  const auto run_one = [&](int rep) {
    const Stream stream = simulate_stream(cfg, channel ? &eadf : nullptr, rep);
    RepOutput out;
    out.summary.replication = rep;
    out.summary.stream_hash = stream.hash;
    for (const auto& mode_name : cfg.modes) {
      auto records = run_mode(cfg, stream, mode_name, rep);
      std::vector<const EpochRecord*> view;
      view.reserve(records.size());
      for (const auto& r : records) view.push_back(&r);
      out.summary.metrics[mode_name] = compute_metrics(view, cfg.warmup_epochs);
      out.records.insert(out.records.end(), std::make_move_iterator(records.begin()),
                         std::make_move_iterator(records.end()));
    }
    outputs[static_cast<std::size_t>(rep)] = std::move(out);
  };

  int workers = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, cfg.replications));
  if (workers == 1) {
    for (int rep = 0; rep < cfg.replications; ++rep) run_one(rep);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int rep = w; rep < cfg.replications; rep += workers) run_one(rep);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (auto& out : outputs) {
    result.replications.push_back(std::move(out.summary));
    result.records.insert(result.records.end(), std::make_move_iterator(out.records.begin()),
                          std::make_move_iterator(out.records.end()));
  }

  for (const auto& mode_name : cfg.modes) {
    std::vector<const ModeMetrics*> per_rep;
    for (const auto& rep : result.replications) {
      per_rep.push_back(&rep.metrics.at(mode_name));
    }
    result.median_metrics[mode_name] = aggregate(per_rep, true);
    result.mean_metrics[mode_name] = aggregate(per_rep, false);
  }
  return result;
}

std::string epochs_csv(const RunResult& result) {
  std::size_t max_ans = 0;
  for (const auto& rec : result.records) max_ans = std::max(max_ans, rec.ans.size());

  std::string csv = "schema_version,replication,mode,epoch,t,p_true_x,p_true_y,p_true_z,"
                    "p_est_x,p_est_y,p_est_z,rho_un_true,rho_un_est";
  for (std::size_t j = 0; j < max_ans; ++j) {
    const std::string p = "an" + std::to_string(j) + "_";
    csv += "," + p + "id," + p + "rho_true," + p + "rho_est," + p + "theta_true," + p +
           "theta_meas," + p + "phi_true," + p + "phi_meas," + p + "tau_true," + p + "tau_meas";
  }
  csv += "\n";

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& rec : result.records) {
    csv += std::to_string(kCsvSchemaVersion) + "," + std::to_string(rec.replication) + "," +
           rec.mode + "," + std::to_string(rec.epoch) + "," + format_double(rec.t);
    for (int c = 0; c < 3; ++c) csv += "," + format_double(rec.p_true(c));
    for (int c = 0; c < 3; ++c) csv += "," + format_double(rec.p_est(c));
    csv += "," + format_double(rec.rho_un_true) + "," + format_double(rec.rho_un_est);
    for (std::size_t j = 0; j < max_ans; ++j) {
      if (j < rec.ans.size()) {
        const auto& an = rec.ans[j];
        csv += "," + std::to_string(an.an_id) + "," + format_double(an.rho_true) + "," +
               format_double(an.rho_est) + "," + format_double(an.theta_true) + "," +
               format_double(an.theta_meas) + "," + format_double(an.phi_true) + "," +
               format_double(an.phi_meas) + "," + format_double(an.tau_true) + "," +
               format_double(an.tau_meas);
      } else {
        csv += ",-1";
        for (int c = 0; c < 8; ++c) csv += "," + format_double(nan);
      }
    }
    csv += "\n";
  }
  return csv;
}

nlohmann::json summary_json(const RunResult& result) {
  nlohmann::json j;
  j["schema_version"] = kCsvSchemaVersion;
  nlohmann::json hashes = nlohmann::json::array();
  for (const auto& rep : result.replications) hashes.push_back(rep.stream_hash);
  j["stream_hashes"] = std::move(hashes);

  nlohmann::json modes = nlohmann::json::object();
  for (const auto& [mode_name, median] : result.median_metrics) {
    nlohmann::json entry;
    nlohmann::json per_rep = nlohmann::json::array();
    for (const auto& rep : result.replications) {
      per_rep.push_back(metrics_to_json(rep.metrics.at(mode_name)));
    }
    entry["per_replication"] = std::move(per_rep);
    entry["median"] = metrics_to_json(median);
    entry["mean"] = metrics_to_json(result.mean_metrics.at(mode_name));
    modes[mode_name] = std::move(entry);
  }
  j["modes"] = std::move(modes);
  return j;
}

void write_outputs(const RunResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("write_outputs: cannot create '" + out_dir + "': " + ec.message());
  }
  const auto write_file = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_outputs: cannot open '" + path.string() + "'");
    f << content;
    if (!f) throw std::runtime_error("write_outputs: write failed for '" + path.string() + "'");
  };
  write_file("epochs.csv", epochs_csv(result));
  write_file("summary.json", summary_json(result).dump(2) + "\n");
  write_file("config_echo.json", result.config_echo.dump(2) + "\n");
}

}  // namespace posync
