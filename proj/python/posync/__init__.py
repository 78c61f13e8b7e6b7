"""Cascaded DoA/ToA tracking with joint 3D positioning and network clock
synchronization (UKF/EKF), plus the scenario simulator and RMSE harness.

The heavy lifting lives in the compiled extension ``posync._core``; this
package re-exports its public surface and adds small JSON conveniences.
"""

import json as _json

from posync._core import (  # noqa: F401
    SPEED_OF_LIGHT,
    AnNode,
    ArrayGeometry,
    ChannelSnapshot,
    ClockState,
    ClockTruthParams,
    ConfigError,
    DoaToaTracker,
    Eadf,
    EpochMeasurement,
    FilterKind,
    FusionConfig,
    FusionFilter,
    FusionMode,
    GaussianState,
    LinearTransition,
    MeasurementSet,
    NumericalError,
    SigmaPointSet,
    StateTag,
    SyncMode,
    Trajectory,
    TrackerConfig,
    TrackerEstimate,
    TrackerInit,
    UtParams,
    __version__,
    angle_steering,
    build_network,
    cholesky_with_jitter,
    clock_process_blocks,
    colatitude_from_elevation,
    delay_steering,
    ekf_update,
    elevation_from_colatitude,
    fusion_transition,
    gen_trajectory,
    generate_snapshot,
    init_position_cl,
    init_tracker,
    manage_an_set,
    measurement_jacobian,
    observation_geometry,
    polarimetric_response,
    predict_linear,
    predict_measurement,
    select_los,
    sigma_points,
    simulate_clock,
    synthesize_eadf,
    tracker_transition,
    true_observables,
    ukf_update,
    ut_moments,
    ut_weights,
    wrap_angle,
)
from posync import _core as _c


def default_config() -> dict:
    """Fully-resolved default scenario configuration."""
    return _json.loads(_c.default_config())


def config_schema() -> dict:
    """Per-field schema of the scenario configuration."""
    return _json.loads(_c.config_schema())


def run_scenario(config, out_dir: str = "") -> dict:
    """Run a scenario from a config dict (or JSON string) and return the
    summary metrics; optionally write epochs.csv / summary.json /
    config_echo.json to ``out_dir``."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(_c.run_scenario(config, out_dir))
