// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/config.hpp"

#include <fstream>
#include <set>

namespace posync {

namespace {

using nlohmann::json;

/// Cursor over one JSON object that records its path for diagnostics and
/// rejects unknown keys when finished.
class Section {
 public:
  Section(json j, std::string path) : obj_(std::move(j)), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  double number(const char* key, double dflt) {
    seen_.insert(key);
    if (!obj_.contains(key)) return dflt;
    const auto& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
    return v.get<double>();
  }

  double positive(const char* key, double dflt) {
    const double v = number(key, dflt);
    if (!(v > 0.0)) throw ConfigError(field(key) + ": must be > 0");
    return v;
  }

  double nonnegative(const char* key, double dflt) {
    const double v = number(key, dflt);
    if (!(v >= 0.0)) throw ConfigError(field(key) + ": must be >= 0");
    return v;
  }

  int integer(const char* key, int dflt, int min_value) {
    seen_.insert(key);
    if (!obj_.contains(key)) return dflt;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
    const int out = v.get<int>();
    if (out < min_value) {
      throw ConfigError(field(key) + ": must be >= " + std::to_string(min_value));
    }
    return out;
  }

  std::uint64_t uint64(const char* key, std::uint64_t dflt) {
    seen_.insert(key);
    if (!obj_.contains(key)) return dflt;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
    return v.get<std::uint64_t>();
  }

  std::string choice(const char* key, std::string dflt,
                     const std::vector<std::string>& allowed) {
    seen_.insert(key);
    if (!obj_.contains(key)) return dflt;
    const auto& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
    const auto out = v.get<std::string>();
    if (std::find(allowed.begin(), allowed.end(), out) == allowed.end()) {
      std::string msg = field(key) + ": '" + out + "' is not one of {";
      for (std::size_t i = 0; i < allowed.size(); ++i) {
        msg += (i ? ", " : "") + allowed[i];
      }
      throw ConfigError(msg + "}");
    }
    return out;
  }

  json child(const char* key) {
    seen_.insert(key);
    if (!obj_.contains(key)) return json::object();
    if (!obj_.at(key).is_object()) throw ConfigError(field(key) + ": expected an object");
    return obj_.at(key);
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(path_.empty() ? "unknown key '" + it.key() + "'"
                                        : path_ + ": unknown key '" + it.key() + "'");
      }
    }
  }

 private:
  json obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_odd_cfg(int value, const std::string& field) {
  if (value % 2 == 0) throw ConfigError(field + ": must be odd");
}

}  // namespace

ScenarioConfig parse_config(const nlohmann::json& j) {
  ScenarioConfig cfg;
  const ScenarioConfig defaults;
  Section root(j, "");

  cfg.seed = root.uint64("seed", defaults.seed);
  cfg.replications = root.integer("replications", defaults.replications, 1);
  cfg.threads = root.integer("threads", defaults.threads, 0);
  cfg.duration_s = root.positive("duration_s", defaults.duration_s);
  cfg.epoch_dt_s = root.positive("epoch_dt_s", defaults.epoch_dt_s);
  cfg.warmup_epochs = root.integer("warmup_epochs", defaults.warmup_epochs, 0);

  if (root.has("modes")) {
    const auto& modes = root.raw("modes");
    if (!modes.is_array() || modes.empty()) {
      throw ConfigError("modes: expected a non-empty array of mode strings");
    }
    cfg.modes.clear();
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (!modes.at(i).is_string()) {
        throw ConfigError("modes[" + std::to_string(i) + "]: expected a string");
      }
      const auto name = modes.at(i).get<std::string>();
      try {
        FusionMode::parse(name);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("modes[" + std::to_string(i) + "]: " + e.what());
      }
      cfg.modes.push_back(name);
    }
  }

  {
    Section net(root.child("network"), "network");
    cfg.network.spacing = net.positive("spacing_m", defaults.network.spacing);
    cfg.network.extent_x = net.nonnegative("extent_x_m", defaults.network.extent_x);
    cfg.network.extent_y = net.nonnegative("extent_y_m", defaults.network.extent_y);
    cfg.network.height = net.number("height_m", defaults.network.height);
    net.finish();
  }

  cfg.los_count = root.integer("los_count", defaults.los_count, 1);
  cfg.an_clock_scenario = root.choice("an_clock_scenario", defaults.an_clock_scenario,
                                      {"synchronized", "phase_locked"});

  {
    Section clk(root.child("clock_truth"), "clock_truth");
    cfg.clock_truth.beta = clk.number("beta", defaults.clock_truth.beta);
    cfg.clock_truth.sigma_eta = clk.nonnegative("sigma_eta", defaults.clock_truth.sigma_eta);
    cfg.clock_truth.init_offset_std =
        clk.nonnegative("init_offset_std_s", defaults.clock_truth.init_offset_std);
    cfg.clock_truth.init_skew_mean =
        clk.number("init_skew_mean", defaults.clock_truth.init_skew_mean);
    cfg.clock_truth.init_skew_std =
        clk.nonnegative("init_skew_std", defaults.clock_truth.init_skew_std);
    clk.finish();
  }

  cfg.measurement_mode =
      root.choice("measurement_mode", defaults.measurement_mode, {"direct", "channel"});

  {
    Section dn(root.child("direct_noise"), "direct_noise");
    cfg.direct_noise.sigma_elevation =
        dn.nonnegative("sigma_elevation_rad", defaults.direct_noise.sigma_elevation);
    cfg.direct_noise.sigma_azimuth =
        dn.nonnegative("sigma_azimuth_rad", defaults.direct_noise.sigma_azimuth);
    cfg.direct_noise.sigma_toa = dn.nonnegative("sigma_toa_s", defaults.direct_noise.sigma_toa);
    dn.finish();
  }

  {
    Section ch(root.child("channel"), "channel");
    cfg.channel.snr_db = ch.number("snr_db", defaults.channel.snr_db);
    cfg.channel.carrier_hz = ch.positive("carrier_hz", defaults.channel.carrier_hz);
    cfg.channel.subcarrier_spacing_hz =
        ch.positive("subcarrier_spacing_hz", defaults.channel.subcarrier_spacing_hz);
    cfg.channel.subcarrier_count =
        ch.integer("subcarrier_count", defaults.channel.subcarrier_count, 1);
    require_odd_cfg(cfg.channel.subcarrier_count, "channel.subcarrier_count");
    cfg.channel.modes_azimuth = ch.integer("modes_azimuth", defaults.channel.modes_azimuth, 1);
    require_odd_cfg(cfg.channel.modes_azimuth, "channel.modes_azimuth");
    cfg.channel.modes_elevation =
        ch.integer("modes_elevation", defaults.channel.modes_elevation, 1);
    require_odd_cfg(cfg.channel.modes_elevation, "channel.modes_elevation");
    cfg.channel.grid_azimuth = ch.integer("grid_azimuth", defaults.channel.grid_azimuth, 1);
    cfg.channel.grid_elevation = ch.integer("grid_elevation", defaults.channel.grid_elevation, 1);
    if (cfg.channel.grid_azimuth < cfg.channel.modes_azimuth ||
        cfg.channel.grid_elevation < cfg.channel.modes_elevation) {
      throw ConfigError("channel: grid density must be >= mode counts (aliasing)");
    }
    cfg.channel.elements_per_ring =
        ch.integer("elements_per_ring", defaults.channel.elements_per_ring, 1);
    ch.finish();
  }

  {
    Section s1(root.child("stage1"), "stage1");
    cfg.stage1.sigma_tau_rate = s1.nonnegative("sigma_tau_rate", defaults.stage1.sigma_tau_rate);
    cfg.stage1.sigma_azimuth_rate =
        s1.nonnegative("sigma_azimuth_rate", defaults.stage1.sigma_azimuth_rate);
    cfg.stage1.sigma_colat_rate =
        s1.nonnegative("sigma_colat_rate", defaults.stage1.sigma_colat_rate);
    cfg.stage1.lambda_override = s1.number("lambda_override", defaults.stage1.lambda_override);
    cfg.stage1.ut_beta = s1.number("ut_beta", defaults.stage1.ut_beta);
    cfg.stage1.gn_iters = s1.integer("gn_iters", defaults.stage1.gn_iters, 1);
    cfg.stage1.init_tau_grid = s1.integer("init_tau_grid", defaults.stage1.init_tau_grid, 2);
    cfg.stage1.init_azimuth_grid =
        s1.integer("init_azimuth_grid", defaults.stage1.init_azimuth_grid, 2);
    cfg.stage1.init_colat_grid =
        s1.integer("init_colat_grid", defaults.stage1.init_colat_grid, 2);
    cfg.stage1.matched_power_threshold =
        s1.nonnegative("matched_power_threshold", defaults.stage1.matched_power_threshold);
    s1.finish();
  }

  {
    Section fu(root.child("fusion"), "fusion");
    cfg.fusion.sigma_v = fu.positive("sigma_v_mps", defaults.fusion.sigma_v);
    cfg.fusion.sigma_eta = fu.nonnegative("sigma_eta", defaults.fusion.sigma_eta);
    cfg.fusion.sigma_rho = fu.nonnegative("sigma_rho_s", defaults.fusion.sigma_rho);
    cfg.fusion.ut.alpha = fu.positive("ut_alpha", defaults.fusion.ut.alpha);
    cfg.fusion.ut.beta = fu.number("ut_beta", defaults.fusion.ut.beta);
    cfg.fusion.ut.kappa = fu.number("ut_kappa", defaults.fusion.ut.kappa);
    cfg.fusion.init_vel_std = fu.positive("init_vel_std_mps", defaults.fusion.init_vel_std);
    cfg.fusion.init_offset_std = fu.positive("init_offset_std_s", defaults.fusion.init_offset_std);
    cfg.fusion.init_skew_mean = fu.number("init_skew_mean", defaults.fusion.init_skew_mean);
    cfg.fusion.init_skew_std = fu.positive("init_skew_std", defaults.fusion.init_skew_std);
    cfg.fusion.init_pos_floor_std =
        fu.positive("init_pos_floor_std_m", defaults.fusion.init_pos_floor_std);
    cfg.fusion_r_source =
        fu.choice("r_source", defaults.fusion_r_source, {"stage1", "configured"});
    fu.finish();
  }

  {
    Section tr(root.child("trajectory"), "trajectory");
    cfg.trajectory_kind =
        tr.choice("kind", defaults.trajectory_kind, {"vehicle", "drone", "line"});
    cfg.trajectory.v_max = tr.positive("v_max_mps", defaults.trajectory.v_max);
    cfg.trajectory.accel = tr.positive("accel_mps2", defaults.trajectory.accel);
    cfg.trajectory.x_min = tr.number("x_min_m", defaults.trajectory.x_min);
    cfg.trajectory.x_max = tr.number("x_max_m", defaults.trajectory.x_max);
    cfg.trajectory.y_min = tr.number("y_min_m", defaults.trajectory.y_min);
    cfg.trajectory.y_max = tr.number("y_max_m", defaults.trajectory.y_max);
    if (cfg.trajectory.x_max < cfg.trajectory.x_min ||
        cfg.trajectory.y_max < cfg.trajectory.y_min) {
      throw ConfigError("trajectory: max bound below min bound");
    }
    cfg.trajectory.z_vehicle = tr.number("z_vehicle_m", defaults.trajectory.z_vehicle);
    cfg.trajectory.z_min = tr.number("z_min_m", defaults.trajectory.z_min);
    cfg.trajectory.z_max = tr.number("z_max_m", defaults.trajectory.z_max);
    if (cfg.trajectory.z_max < cfg.trajectory.z_min) {
      throw ConfigError("trajectory: z_max_m below z_min_m");
    }
    cfg.trajectory.waypoint_min_leg =
        tr.nonnegative("waypoint_min_leg_m", defaults.trajectory.waypoint_min_leg);
    if (tr.has("start")) {
      const auto& start = tr.raw("start");
      if (!start.is_array() || start.size() != 3 || !start.at(0).is_number() ||
          !start.at(1).is_number() || !start.at(2).is_number()) {
        throw ConfigError("trajectory.start: expected [x, y, z]");
      }
      cfg.trajectory.start = Eigen::Vector3d(start.at(0).get<double>(),
                                             start.at(1).get<double>(),
                                             start.at(2).get<double>());
    }
    if (tr.has("line_velocity_mps")) {
      const auto& v = tr.raw("line_velocity_mps");
      if (!v.is_array() || v.size() != 3) {
        throw ConfigError("trajectory.line_velocity_mps: expected [vx, vy, vz]");
      }
      cfg.trajectory.line_velocity = Eigen::Vector3d(
          v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>());
    }
    cfg.trajectory.line_hold_s = tr.nonnegative("line_hold_s", defaults.trajectory.line_hold_s);
    tr.finish();
  }

  root.finish();
  return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

nlohmann::json config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["replications"] = cfg.replications;
  j["threads"] = cfg.threads;
  j["duration_s"] = cfg.duration_s;
  j["epoch_dt_s"] = cfg.epoch_dt_s;
  j["warmup_epochs"] = cfg.warmup_epochs;
  j["modes"] = cfg.modes;
  j["network"] = {{"spacing_m", cfg.network.spacing},
                  {"extent_x_m", cfg.network.extent_x},
                  {"extent_y_m", cfg.network.extent_y},
                  {"height_m", cfg.network.height}};
  j["los_count"] = cfg.los_count;
  j["an_clock_scenario"] = cfg.an_clock_scenario;
  j["clock_truth"] = {{"beta", cfg.clock_truth.beta},
                      {"sigma_eta", cfg.clock_truth.sigma_eta},
                      {"init_offset_std_s", cfg.clock_truth.init_offset_std},
                      {"init_skew_mean", cfg.clock_truth.init_skew_mean},
                      {"init_skew_std", cfg.clock_truth.init_skew_std}};
  j["measurement_mode"] = cfg.measurement_mode;
  j["direct_noise"] = {{"sigma_elevation_rad", cfg.direct_noise.sigma_elevation},
                       {"sigma_azimuth_rad", cfg.direct_noise.sigma_azimuth},
                       {"sigma_toa_s", cfg.direct_noise.sigma_toa}};
  j["channel"] = {{"snr_db", cfg.channel.snr_db},
                  {"carrier_hz", cfg.channel.carrier_hz},
                  {"subcarrier_spacing_hz", cfg.channel.subcarrier_spacing_hz},
                  {"subcarrier_count", cfg.channel.subcarrier_count},
                  {"modes_azimuth", cfg.channel.modes_azimuth},
                  {"modes_elevation", cfg.channel.modes_elevation},
                  {"grid_azimuth", cfg.channel.grid_azimuth},
                  {"grid_elevation", cfg.channel.grid_elevation},
                  {"elements_per_ring", cfg.channel.elements_per_ring}};
  j["stage1"] = {{"sigma_tau_rate", cfg.stage1.sigma_tau_rate},
                 {"sigma_azimuth_rate", cfg.stage1.sigma_azimuth_rate},
                 {"sigma_colat_rate", cfg.stage1.sigma_colat_rate},
                 {"lambda_override", cfg.stage1.lambda_override},
                 {"ut_beta", cfg.stage1.ut_beta},
                 {"gn_iters", cfg.stage1.gn_iters},
                 {"init_tau_grid", cfg.stage1.init_tau_grid},
                 {"init_azimuth_grid", cfg.stage1.init_azimuth_grid},
                 {"init_colat_grid", cfg.stage1.init_colat_grid},
                 {"matched_power_threshold", cfg.stage1.matched_power_threshold}};
  j["fusion"] = {{"sigma_v_mps", cfg.fusion.sigma_v},
                 {"sigma_eta", cfg.fusion.sigma_eta},
                 {"sigma_rho_s", cfg.fusion.sigma_rho},
                 {"ut_alpha", cfg.fusion.ut.alpha},
                 {"ut_beta", cfg.fusion.ut.beta},
                 {"ut_kappa", cfg.fusion.ut.kappa},
                 {"init_vel_std_mps", cfg.fusion.init_vel_std},
                 {"init_offset_std_s", cfg.fusion.init_offset_std},
                 {"init_skew_mean", cfg.fusion.init_skew_mean},
                 {"init_skew_std", cfg.fusion.init_skew_std},
                 {"init_pos_floor_std_m", cfg.fusion.init_pos_floor_std},
                 {"r_source", cfg.fusion_r_source}};
  j["trajectory"] = {{"kind", cfg.trajectory_kind},
                     {"v_max_mps", cfg.trajectory.v_max},
                     {"accel_mps2", cfg.trajectory.accel},
                     {"x_min_m", cfg.trajectory.x_min},
                     {"x_max_m", cfg.trajectory.x_max},
                     {"y_min_m", cfg.trajectory.y_min},
                     {"y_max_m", cfg.trajectory.y_max},
                     {"z_vehicle_m", cfg.trajectory.z_vehicle},
                     {"z_min_m", cfg.trajectory.z_min},
                     {"z_max_m", cfg.trajectory.z_max},
                     {"waypoint_min_leg_m", cfg.trajectory.waypoint_min_leg},
                     {"line_hold_s", cfg.trajectory.line_hold_s},
                     {"line_velocity_mps",
                      {cfg.trajectory.line_velocity.x(), cfg.trajectory.line_velocity.y(),
                       cfg.trajectory.line_velocity.z()}}};
  if (cfg.trajectory.start) {
    j["trajectory"]["start"] = {cfg.trajectory.start->x(), cfg.trajectory.start->y(),
                                cfg.trajectory.start->z()};
  }
  return j;
}

namespace {

json field_doc(const char* type, const json& dflt, const char* description) {
  return json{{"type", type}, {"default", dflt}, {"description", description}};
}

}  // namespace

nlohmann::json config_schema() {
  const ScenarioConfig d;
  json s;
  s["$schema_version"] = 1;
  s["seed"] = field_doc("integer", d.seed, "base RNG seed; replication r uses (seed, r)");
  s["replications"] = field_doc("integer", d.replications, "independent scenario repetitions");
  s["threads"] = field_doc("integer", d.threads, "worker threads (0 = hardware concurrency)");
  s["duration_s"] = field_doc("number", d.duration_s, "trajectory duration in seconds");
  s["epoch_dt_s"] = field_doc("number", d.epoch_dt_s, "filter update period in seconds");
  s["warmup_epochs"] =
      field_doc("integer", d.warmup_epochs, "epochs excluded from RMSE metrics");
  s["modes"] = field_doc("array of strings", d.modes,
                         "filter variants: {posclock|possync}_{ukf|ekf}[_doaonly]");
  s["network"] = {
      {"spacing_m", field_doc("number", d.network.spacing, "AN grid spacing")},
      {"extent_x_m", field_doc("number", d.network.extent_x, "grid extent along x")},
      {"extent_y_m", field_doc("number", d.network.extent_y, "grid extent along y")},
      {"height_m", field_doc("number", d.network.height, "AN mounting height")}};
  s["los_count"] = field_doc("integer", d.los_count, "closest LoS ANs fused per epoch");
  s["an_clock_scenario"] =
      field_doc("string", d.an_clock_scenario,
                "'synchronized' (zero AN offsets) or 'phase_locked' (constant random offsets)");
  s["clock_truth"] = {
      {"beta", field_doc("number", d.clock_truth.beta, "truth skew AR coefficient")},
      {"sigma_eta", field_doc("number", d.clock_truth.sigma_eta, "truth skew noise std")},
      {"init_offset_std_s",
       field_doc("number", d.clock_truth.init_offset_std, "initial offset std, seconds")},
      {"init_skew_mean", field_doc("number", d.clock_truth.init_skew_mean, "initial skew mean")},
      {"init_skew_std", field_doc("number", d.clock_truth.init_skew_std, "initial skew std")}};
  s["measurement_mode"] =
      field_doc("string", d.measurement_mode,
                "'direct' (noisy observables) or 'channel' (snapshots + stage-1 trackers)");
  s["direct_noise"] = {
      {"sigma_elevation_rad", field_doc("number", d.direct_noise.sigma_elevation, "")},
      {"sigma_azimuth_rad", field_doc("number", d.direct_noise.sigma_azimuth, "")},
      {"sigma_toa_s", field_doc("number", d.direct_noise.sigma_toa, "")}};
  s["channel"] = {
      {"snr_db", field_doc("number", d.channel.snr_db, "per-snapshot SNR")},
      {"carrier_hz", field_doc("number", d.channel.carrier_hz, "carrier for the array wavelength")},
      {"subcarrier_spacing_hz", field_doc("number", d.channel.subcarrier_spacing_hz, "f0")},
      {"subcarrier_count", field_doc("integer (odd)", d.channel.subcarrier_count, "pilot count")},
      {"modes_azimuth", field_doc("integer (odd)", d.channel.modes_azimuth, "EADF modes")},
      {"modes_elevation", field_doc("integer (odd)", d.channel.modes_elevation, "EADF modes")},
      {"grid_azimuth", field_doc("integer", d.channel.grid_azimuth, "EADF synthesis grid")},
      {"grid_elevation", field_doc("integer", d.channel.grid_elevation, "EADF synthesis grid")},
      {"elements_per_ring",
       field_doc("integer", d.channel.elements_per_ring, "cylindrical array ring size")}};
  s["stage1"] = {
      {"sigma_tau_rate", field_doc("number", d.stage1.sigma_tau_rate, "tracker process noise")},
      {"sigma_azimuth_rate", field_doc("number", d.stage1.sigma_azimuth_rate, "")},
      {"sigma_colat_rate", field_doc("number", d.stage1.sigma_colat_rate, "")},
      {"lambda_override",
       field_doc("number", d.stage1.lambda_override,
                 "sigma-point scaling lambda (tuning knob; sqrt(lambda+n) spread)")},
      {"ut_beta", field_doc("number", d.stage1.ut_beta, "")},
      {"gn_iters", field_doc("integer", d.stage1.gn_iters, "iterated updates per snapshot")},
      {"init_tau_grid", field_doc("integer", d.stage1.init_tau_grid, "")},
      {"init_azimuth_grid", field_doc("integer", d.stage1.init_azimuth_grid, "")},
      {"init_colat_grid", field_doc("integer", d.stage1.init_colat_grid, "")},
      {"matched_power_threshold",
       field_doc("number", d.stage1.matched_power_threshold, "low-power init flag level")}};
  s["fusion"] = {
      {"sigma_v_mps", field_doc("number", d.fusion.sigma_v, "velocity process noise")},
      {"sigma_eta", field_doc("number", d.fusion.sigma_eta, "filter clock-skew process noise")},
      {"sigma_rho_s", field_doc("number", d.fusion.sigma_rho, "AN offset random walk std")},
      {"ut_alpha", field_doc("number", d.fusion.ut.alpha, "")},
      {"ut_beta", field_doc("number", d.fusion.ut.beta, "")},
      {"ut_kappa", field_doc("number", d.fusion.ut.kappa, "")},
      {"init_vel_std_mps", field_doc("number", d.fusion.init_vel_std, "")},
      {"init_offset_std_s", field_doc("number", d.fusion.init_offset_std, "")},
      {"init_skew_mean", field_doc("number", d.fusion.init_skew_mean, "")},
      {"init_skew_std", field_doc("number", d.fusion.init_skew_std, "")},
      {"init_pos_floor_std_m", field_doc("number", d.fusion.init_pos_floor_std, "")},
      {"r_source", field_doc("string", d.fusion_r_source,
                             "'stage1' (tracker covariance) or 'configured' (direct_noise)")}};
  s["trajectory"] = {
      {"kind", field_doc("string", d.trajectory_kind, "vehicle | drone | line")},
      {"v_max_mps", field_doc("number", d.trajectory.v_max, "speed cap")},
      {"accel_mps2", field_doc("number", d.trajectory.accel, "trapezoidal profile acceleration")},
      {"x_min_m", field_doc("number", d.trajectory.x_min, "")},
      {"x_max_m", field_doc("number", d.trajectory.x_max, "")},
      {"y_min_m", field_doc("number", d.trajectory.y_min, "")},
      {"y_max_m", field_doc("number", d.trajectory.y_max, "")},
      {"z_vehicle_m", field_doc("number", d.trajectory.z_vehicle, "vehicle height")},
      {"z_min_m", field_doc("number", d.trajectory.z_min, "drone ground level")},
      {"z_max_m", field_doc("number", d.trajectory.z_max, "drone altitude cap")},
      {"waypoint_min_leg_m", field_doc("number", d.trajectory.waypoint_min_leg, "")},
      {"start", field_doc("array [x,y,z] (optional)", nullptr, "fixed start position")},
      {"line_velocity_mps", field_doc("array [vx,vy,vz]", {0.0, 0.0, 0.0}, "line kind only")},
      {"line_hold_s",
       field_doc("number", d.trajectory.line_hold_s, "stationary hold before moving (line)")}};
  return s;
}

}  // namespace posync
