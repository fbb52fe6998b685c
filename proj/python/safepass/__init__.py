"""Safe, passive barrier control for mechanical systems."""

from ._core import (
    BarrierConfig,
    BlendCurve,
    ConstraintSpace,
    CsvFormatError,
    DivergenceError,
    Ellipsoid,
    GainCalibration,
    MechanicalModel,
    PointMass,
    Scenario,
    ScenarioError,
    ScenarioFile,
    Trajectory,
    TrajectoryCheckOptions,
    TrajectorySummary,
    TwoLinkArm,
    TwoLinkParams,
    baseline_qp_control,
    c_value,
    calibrate_gain,
    check_structural,
    grad_c,
    h_value,
    kappa,
    load_scenario,
    parse_scenario,
    phi_eps,
    read_csv,
    safe_control,
    simulate,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
