"""Observer-based output-feedback stabilization for dissipative state-affine systems."""

from dissiped._core import (  # noqa: F401
    DetectabilityViolatedError,
    DimensionMismatchError,
    NoConvergenceError,
    NonFiniteStateError,
    NotStrictLyapunovError,
    ScenarioBundle,
    SimConfig,
    SingularMatrixError,
    Trajectory,
    UnknownMetricError,
    __version__,
    adaptive_gain,
    analyze,
    build_cuk,
    build_harmonic_oscillator,
    build_heat_exchanger,
    build_scenario,
    eigenvalues,
    extract_metric,
    observability_matrix,
    run_acceptance,
    scenario_names,
    simulate,
    solve_linear,
    spectral_norm,
    write_trajectory_csv,
)
