"""Grid toolkit for the penalized volume-constrained p-Dirichlet problem."""

from ._core import (  # noqa: F401
    AnnulusOracleResult,
    BoundaryData,
    EnergyBreakdown,
    FreeBoundaryReport,
    GridDomain,
    Oracle1DResult,
    PenaltyParams,
    RunConfig,
    ScalarField,
    Solution,
    SolverConfig,
    build_annulus,
    build_halfdisk,
    build_rectangle,
    dirichlet_p_energy,
    estimate_lambda,
    extract_free_boundary,
    oracle_1d_minimizer,
    oracle_annulus_minimizer,
    parse_config_text,
    penalty,
    positivity_measure,
    run_epsilon_sweep,
    solve_penalized,
    total_energy,
    uniform_boundary,
)

__all__ = [name for name in dir() if not name.startswith("_")]
