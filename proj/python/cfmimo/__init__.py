"""Uplink crowded cell-free massive MIMO-OFDM simulation toolkit.

Thin Python layer over the compiled core: correlated channel synthesis,
phase-shift pilot allocation and MMSE estimation, activity detection via
hopping patterns, Monte-Carlo link statistics, and max-min power control.
"""

from _cfmimo import (  # noqa: F401
    AllocationOutcome,
    ExperimentKind,
    ExperimentSpec,
    HoppingPatterns,
    LinkStatistics,
    LpResult,
    LpStatus,
    PilotPlan,
    PowerSolution,
    PowerSpectrum,
    Rng,
    Scenario,
    SystemConfig,
    TransformPair,
    allocate_apsp,
    angle_grid,
    averaged_mse,
    bisection_oracle,
    build_patterns,
    build_pilot_matrix,
    build_power_spectrum,
    build_scenario,
    covariance_from_spectrum,
    delay_offset,
    dinkelbach,
    estimate_link_statistics,
    expected_mse,
    expected_mse_given_ka,
    from_space_frequency,
    kmeans_cluster,
    lp_solve,
    mmse_error_spectrum,
    mmse_gain,
    mrc_combiner,
    mse_floor,
    mse_lower_bound,
    overlap_coefficient,
    parse_config_file,
    path_loss_chi_db,
    path_loss_db,
    rpa_apsp,
    rpa_psop,
    run_experiment,
    sample_activity,
    sample_link,
    se_genie,
    se_lb,
    select_serving_aps,
    shift_group,
    shift_spectrum,
    simplex_solve,
    sinr_lb,
    space_frequency_column,
    to_space_frequency,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
