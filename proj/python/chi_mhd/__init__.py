"""Pseudo-spectral 2D incompressible MHD on the torus, with the
frequency-weighted L1 (chi^s) norm machinery, two independent solution paths
(integrating-factor stepper and Duhamel fixed point), and an executable
inequality harness.

The compiled core carries the implementation; this package re-exports it.
"""

from chi_mhd._core import (  # noqa: F401
    DEFAULT_C0,
    Grid,
    PicardDiagnostics,
    SolverAbort,
    SolverConfig,
    StatePair,
    Trajectory,
    ContinuationSegment,
    check_apriori,
    check_blowup_majorant,
    check_energy_equality,
    continuation_solve,
    continuum_radial_chi_norm,
    heat_propagate,
    integrate,
    leray_project_state,
    local_existence_time,
    pair_chi_norm,
    pair_l2_norm,
    picard_solve,
    random_state,
    run_suite,
    smallness_threshold,
    split_frequency,
    state_from_arrays,
    taylor_green_state,
    weak_strong_experiment,
)

__version__ = "0.1.0"
