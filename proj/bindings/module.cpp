// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "posync/angles.hpp"
#include "posync/runner.hpp"

namespace py = pybind11;
using namespace posync;

namespace {

GaussianState make_state(const Vec& mean, const Mat& cov, const std::vector<StateTag>& layout) {
  return GaussianState(mean, cov, layout);
}

std::pair<std::vector<double>, std::vector<double>> simulate_clock(
    int steps, double dt, const ClockTruthParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ClockState c = sample_initial_clock(params, rng);
  std::vector<double> offsets{c.offset}, skews{c.skew};
  for (int k = 0; k < steps; ++k) {
    c = step_clock(c, dt, params, rng);
    offsets.push_back(c.offset);
    skews.push_back(c.skew);
  }
  return {offsets, skews};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cascaded DoA/ToA tracking and joint 3D positioning + network clock "
            "synchronization (UKF/EKF core)";

  py::register_exception<NumericalError>(m, "NumericalError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::enum_<StateTag>(m, "StateTag")
      .value("LINEAR", StateTag::Linear)
      .value("ANGLE", StateTag::Angle)
      .value("CLOCK_OFFSET", StateTag::ClockOffset)
      .value("CLOCK_SKEW", StateTag::ClockSkew)
      .value("POSITION", StateTag::Position)
      .value("VELOCITY", StateTag::Velocity);

  py::class_<GaussianState>(m, "GaussianState")
      .def(py::init(&make_state), py::arg("mean"), py::arg("cov"),
           py::arg("layout") = std::vector<StateTag>{})
      .def_readwrite("mean", &GaussianState::mean)
      .def_readwrite("cov", &GaussianState::cov)
      .def_readwrite("layout", &GaussianState::layout)
      .def("validate", &GaussianState::validate)
      .def_property_readonly("dim", &GaussianState::dim);

  py::class_<UtParams>(m, "UtParams")
      .def(py::init([](double alpha, double beta, double kappa) {
             return UtParams{alpha, beta, kappa};
           }),
           py::arg("alpha") = 1e-3, py::arg("beta") = 2.0, py::arg("kappa") = 0.0)
      .def_readwrite("alpha", &UtParams::alpha)
      .def_readwrite("beta", &UtParams::beta)
      .def_readwrite("kappa", &UtParams::kappa)
      .def("lambda_", &UtParams::lambda, py::arg("n"));

  py::class_<SigmaPointSet>(m, "SigmaPointSet")
      .def_readonly("points", &SigmaPointSet::points)
      .def_readonly("weights_mean", &SigmaPointSet::weights_mean)
      .def_readonly("weights_cov", &SigmaPointSet::weights_cov);

  py::class_<LinearTransition>(m, "LinearTransition")
      .def(py::init([](const Mat& f, const Mat& q) { return LinearTransition{f, q}; }),
           py::arg("F"), py::arg("Q"))
      .def_readwrite("F", &LinearTransition::F)
      .def_readwrite("Q", &LinearTransition::Q);

  m.def("wrap_angle", &wrap_angle, py::arg("x"));
  m.def("elevation_from_colatitude", &elevation_from_colatitude);
  m.def("colatitude_from_elevation", &colatitude_from_elevation);
  m.def("ut_weights", &ut_weights, py::arg("n"), py::arg("params"));
  m.def("sigma_points", &sigma_points, py::arg("state"), py::arg("params"));
  m.def("ut_moments", &ut_moments, py::arg("sigma_point_set"));
  m.def("cholesky_with_jitter", &cholesky_with_jitter, py::arg("p"));
  m.def("predict_linear", &predict_linear, py::arg("state"), py::arg("model"));
  m.def(
      "ukf_update",
      [](const GaussianState& prior, const Vec& y, const MeasurementFn& h, const Mat& r,
         const UtParams& params, const Layout& residual_layout) {
        return ukf_update(prior, y, h, r, params, residual_layout);
      },
      py::arg("prior"), py::arg("y"), py::arg("h"), py::arg("R"), py::arg("params"),
      py::arg("residual_layout") = Layout{});
  m.def(
      "ekf_update",
      [](const GaussianState& prior, const Vec& y, const MeasurementFn& h,
         const JacobianFn& jac, const Mat& r, const Layout& residual_layout) {
        return ekf_update(prior, y, h, jac, r, residual_layout);
      },
      py::arg("prior"), py::arg("y"), py::arg("h"), py::arg("jacobian"), py::arg("R"),
      py::arg("residual_layout") = Layout{});

  py::class_<ClockState>(m, "ClockState")
      .def(py::init([](double offset, double skew) {
             return ClockState{offset, skew};
           }),
           py::arg("offset") = 0.0, py::arg("skew") = 0.0)
      .def_readwrite("offset", &ClockState::offset)
      .def_readwrite("skew", &ClockState::skew);

  py::class_<ClockTruthParams>(m, "ClockTruthParams")
      .def(py::init<>())
      .def_readwrite("beta", &ClockTruthParams::beta)
      .def_readwrite("sigma_eta", &ClockTruthParams::sigma_eta)
      .def_readwrite("init_offset_std", &ClockTruthParams::init_offset_std)
      .def_readwrite("init_skew_mean", &ClockTruthParams::init_skew_mean)
      .def_readwrite("init_skew_std", &ClockTruthParams::init_skew_std);

  m.def("simulate_clock", &simulate_clock, py::arg("steps"), py::arg("dt"), py::arg("params"),
        py::arg("seed"),
        "Seeded clock truth simulation; returns (offsets, skews) with the initial draw first.");
  m.def("clock_process_blocks", &clock_process_blocks, py::arg("dt"), py::arg("sigma_eta"),
        py::arg("sigma_rho"), py::arg("slot_count"));

  py::class_<ArrayGeometry>(m, "ArrayGeometry")
      .def_static("cylindrical", &ArrayGeometry::cylindrical, py::arg("wavelength"),
                  py::arg("per_ring") = 5)
      .def_static("single_isotropic", &ArrayGeometry::single_isotropic, py::arg("wavelength"))
      .def_readonly("positions", &ArrayGeometry::positions)
      .def_readonly("wavelength", &ArrayGeometry::wavelength)
      .def_property_readonly("element_count", &ArrayGeometry::element_count);

  py::class_<Eadf>(m, "Eadf")
      .def_readonly("modes_azimuth", &Eadf::modes_azimuth)
      .def_readonly("modes_elevation", &Eadf::modes_elevation)
      .def_readonly("subcarrier_spacing_hz", &Eadf::subcarrier_spacing_hz)
      .def_readonly("subcarrier_count", &Eadf::subcarrier_count)
      .def_property_readonly("element_count", &Eadf::element_count)
      .def_property_readonly("channel_dim", &Eadf::channel_dim)
      .def("to_json", [](const Eadf& e) { return eadf_to_json(e).dump(); })
      .def_static("from_json", [](const std::string& s) {
        return eadf_from_json(nlohmann::json::parse(s));
      });

  m.def("delay_steering", &delay_steering, py::arg("tau"), py::arg("mf"), py::arg("f0"));
  m.def("angle_steering", &angle_steering, py::arg("azimuth"), py::arg("colatitude"),
        py::arg("ma"), py::arg("me"));
  m.def("synthesize_eadf", &synthesize_eadf, py::arg("geometry"), py::arg("ma"), py::arg("me"),
        py::arg("grid_azimuth"), py::arg("grid_elevation"), py::arg("f0"), py::arg("mf"));
  m.def("polarimetric_response", &polarimetric_response, py::arg("eadf"), py::arg("colatitude"),
        py::arg("azimuth"), py::arg("tau"));

  py::class_<ChannelSnapshot>(m, "ChannelSnapshot")
      .def_readonly("g", &ChannelSnapshot::g)
      .def_readonly("noise_var", &ChannelSnapshot::noise_var)
      .def_readonly("an_id", &ChannelSnapshot::an_id)
      .def_readonly("timestamp", &ChannelSnapshot::timestamp);

  m.def(
      "generate_snapshot",
      [](const Eadf& eadf, double colat, double az, double tau, const Eigen::Vector2cd& gamma,
         double noise_var, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return generate_snapshot(eadf, colat, az, tau, gamma, noise_var, rng);
      },
      py::arg("eadf"), py::arg("colatitude"), py::arg("azimuth"), py::arg("tau"),
      py::arg("gamma"), py::arg("noise_var"), py::arg("seed"));

  py::class_<TrackerConfig>(m, "TrackerConfig")
      .def(py::init<>())
      .def_readwrite("sigma_tau_rate", &TrackerConfig::sigma_tau_rate)
      .def_readwrite("sigma_azimuth_rate", &TrackerConfig::sigma_azimuth_rate)
      .def_readwrite("sigma_colat_rate", &TrackerConfig::sigma_colat_rate)
      .def_readwrite("lambda_override", &TrackerConfig::lambda_override)
      .def_readwrite("gn_iters", &TrackerConfig::gn_iters)
      .def_readwrite("init_tau_grid", &TrackerConfig::init_tau_grid)
      .def_readwrite("init_azimuth_grid", &TrackerConfig::init_azimuth_grid)
      .def_readwrite("init_colat_grid", &TrackerConfig::init_colat_grid)
      .def_readwrite("matched_power_threshold", &TrackerConfig::matched_power_threshold);

  py::class_<TrackerInit>(m, "TrackerInit")
      .def_readonly("state", &TrackerInit::state)
      .def_readonly("matched_power_ratio", &TrackerInit::matched_power_ratio)
      .def_readonly("low_power", &TrackerInit::low_power)
      .def_readonly("grid_cell", &TrackerInit::grid_cell);

  py::class_<TrackerEstimate>(m, "TrackerEstimate")
      .def_readonly("azimuth", &TrackerEstimate::azimuth)
      .def_readonly("colatitude", &TrackerEstimate::colatitude)
      .def_readonly("toa", &TrackerEstimate::toa)
      .def_readonly("cov", &TrackerEstimate::cov)
      .def_readonly("innovation_nees", &TrackerEstimate::innovation_nees);

  m.def("tracker_transition", &tracker_transition, py::arg("dt"), py::arg("sigma_tau_rate"),
        py::arg("sigma_azimuth_rate"), py::arg("sigma_colat_rate"));
  m.def("init_tracker", &init_tracker, py::arg("snapshot"), py::arg("eadf"), py::arg("config"));

  py::class_<DoaToaTracker>(m, "DoaToaTracker")
      .def(py::init<const Eadf&, TrackerConfig>(), py::arg("eadf"), py::arg("config"),
           py::keep_alive<1, 2>())
      .def("initialize", &DoaToaTracker::initialize, py::arg("snapshot"))
      .def("step", &DoaToaTracker::step, py::arg("snapshot"), py::arg("dt"))
      .def_property_readonly("initialized", &DoaToaTracker::initialized)
      .def_property_readonly("needs_reinit", &DoaToaTracker::needs_reinit)
      .def_property_readonly("state", &DoaToaTracker::state);

  py::enum_<SyncMode>(m, "SyncMode")
      .value("POS_CLOCK", SyncMode::PosClock)
      .value("POS_SYNC", SyncMode::PosSync);
  py::enum_<FilterKind>(m, "FilterKind").value("UKF", FilterKind::Ukf).value("EKF", FilterKind::Ekf);
  py::enum_<MeasurementSet>(m, "MeasurementSet")
      .value("DOA_TOA", MeasurementSet::DoaToa)
      .value("DOA_ONLY", MeasurementSet::DoaOnly);

  py::class_<FusionMode>(m, "FusionMode")
      .def(py::init<>())
      .def_readwrite("sync", &FusionMode::sync)
      .def_readwrite("kind", &FusionMode::kind)
      .def_readwrite("meas", &FusionMode::meas)
      .def("__str__", &FusionMode::str)
      .def_static("parse", &FusionMode::parse, py::arg("name"));

  py::class_<EpochMeasurement>(m, "EpochMeasurement")
      .def(py::init([](int an_id, const Eigen::Vector3d& y, const Eigen::Matrix3d& r,
                       double timestamp) {
             return EpochMeasurement{an_id, y, r, timestamp};
           }),
           py::arg("an_id"), py::arg("y"), py::arg("R"), py::arg("timestamp") = 0.0)
      .def_readwrite("an_id", &EpochMeasurement::an_id)
      .def_readwrite("y", &EpochMeasurement::y)
      .def_readwrite("R", &EpochMeasurement::r)
      .def_readwrite("timestamp", &EpochMeasurement::timestamp);

  py::class_<FusionConfig>(m, "FusionConfig")
      .def(py::init<>())
      .def_readwrite("sigma_v", &FusionConfig::sigma_v)
      .def_readwrite("sigma_eta", &FusionConfig::sigma_eta)
      .def_readwrite("sigma_rho", &FusionConfig::sigma_rho)
      .def_readwrite("ut", &FusionConfig::ut)
      .def_readwrite("init_vel_std", &FusionConfig::init_vel_std)
      .def_readwrite("init_offset_std", &FusionConfig::init_offset_std)
      .def_readwrite("init_skew_mean", &FusionConfig::init_skew_mean)
      .def_readwrite("init_skew_std", &FusionConfig::init_skew_std)
      .def_readwrite("init_pos_floor_std", &FusionConfig::init_pos_floor_std);

  m.def("observation_geometry", &observation_geometry, py::arg("un_position"),
        py::arg("an_position"), py::arg("rho_an"), py::arg("rho_un"));
  m.def("fusion_transition", &fusion_transition, py::arg("sync"), py::arg("dt"),
        py::arg("sigma_v"), py::arg("sigma_eta"), py::arg("sigma_rho"), py::arg("slot_count"));
  m.def("predict_measurement", &predict_measurement, py::arg("state"), py::arg("an_position"),
        py::arg("an_slot") = -1);
  m.def("measurement_jacobian", &measurement_jacobian, py::arg("state"), py::arg("n"),
        py::arg("an_position"), py::arg("an_slot") = -1);
  m.def("init_position_cl", &init_position_cl, py::arg("los_an_positions"),
        py::arg("floor_std") = 10.0);
  m.def("manage_an_set", &manage_an_set, py::arg("state"), py::arg("slots"),
        py::arg("new_los_ids"), py::arg("reference_an"), py::arg("offset_prior_std"));

  py::class_<FusionFilter>(m, "FusionFilter")
      .def(py::init<FusionMode, FusionConfig, int, const std::vector<int>&,
                    const std::vector<Eigen::Vector3d>&>(),
           py::arg("mode"), py::arg("config"), py::arg("reference_an"), py::arg("los_ids"),
           py::arg("los_positions"))
      .def("sync_an_slots", &FusionFilter::sync_an_slots, py::arg("los_ids"))
      .def(
          "fuse_epoch",
          [](FusionFilter& f, const std::vector<EpochMeasurement>& meas,
             const std::function<Eigen::Vector3d(int)>& an_position, double dt) {
            f.fuse_epoch(meas, an_position, dt);
          },
          py::arg("measurements"), py::arg("an_position"), py::arg("dt"))
      .def_property_readonly("state", &FusionFilter::state)
      .def_property_readonly("position", &FusionFilter::position)
      .def_property_readonly("velocity", &FusionFilter::velocity)
      .def_property_readonly("clock_offset", &FusionFilter::clock_offset)
      .def_property_readonly("clock_skew", &FusionFilter::clock_skew)
      .def_property_readonly("an_slots", &FusionFilter::an_slots)
      .def("an_offset", &FusionFilter::an_offset, py::arg("an_id"));

  py::class_<AnNode>(m, "AnNode")
      .def_readonly("id", &AnNode::id)
      .def_readonly("position", &AnNode::position)
      .def_readonly("is_reference", &AnNode::is_reference);

  m.def("build_network", &build_network, py::arg("spacing"), py::arg("extent_x"),
        py::arg("extent_y"), py::arg("height"));
  m.def("select_los", &select_los, py::arg("un_position"), py::arg("nodes"), py::arg("l"));
  m.def("true_observables", &true_observables, py::arg("un_position"), py::arg("an"),
        py::arg("un_clock"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("positions", &Trajectory::positions)
      .def_readonly("velocities", &Trajectory::velocities)
      .def_readonly("dt", &Trajectory::dt);

  m.def(
      "gen_trajectory",
      [](const std::string& kind, double duration, double dt, std::uint64_t seed,
         double v_max) {
        TrajectoryConfig cfg;
        cfg.v_max = v_max;
        const auto k = (kind == "vehicle")  ? Trajectory::Kind::Vehicle
                       : (kind == "drone")  ? Trajectory::Kind::Drone
                                            : Trajectory::Kind::Line;
        return gen_trajectory(k, duration, dt, cfg, seed);
      },
      py::arg("kind"), py::arg("duration"), py::arg("dt"), py::arg("seed"),
      py::arg("v_max") = 50.0 / 3.6);

  m.def("default_config", []() { return config_to_json(ScenarioConfig{}).dump(); });
  m.def("config_schema", []() { return config_schema().dump(); });
  m.def(
      "run_scenario",
      [](const std::string& config_json, const std::string& out_dir) {
        const ScenarioConfig cfg = parse_config(nlohmann::json::parse(config_json));
        const RunResult result = run_scenario(cfg);
        if (!out_dir.empty()) write_outputs(result, out_dir);
        return summary_json(result).dump();
      },
      py::arg("config_json"), py::arg("out_dir") = std::string{},
      "Run a scenario from a JSON config string; returns the summary as a JSON string and "
      "optionally writes epochs.csv/summary.json/config_echo.json to out_dir.");

  m.attr("SPEED_OF_LIGHT") = kSpeedOfLight;
#ifdef VERSION_INFO
#define POSYNC_STR(x) #x
#define POSYNC_XSTR(x) POSYNC_STR(x)
  m.attr("__version__") = POSYNC_XSTR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
