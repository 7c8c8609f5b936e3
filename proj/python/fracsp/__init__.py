"""Fractional Schrodinger-Poisson normalized ground states."""

from ._core import (
    ConfigError,
    EnergyBreakdown,
    GroundState,
    MinimizeResult,
    Params,
    SolverConfig,
    blowup_scale,
    config_json,
    energy,
    energy_constant,
    energy_exponent,
    gn_constant,
    gn_ratio,
    minimize,
    Potential,
    constant_potential,
    multi_well,
    single_well,
    zero_potential,
    run,
    seminorm_sq,
    solve_q,
)

__all__ = [
    "ConfigError",
    "EnergyBreakdown",
    "GroundState",
    "MinimizeResult",
    "Params",
    "SolverConfig",
    "blowup_scale",
    "config_json",
    "energy",
    "energy_constant",
    "energy_exponent",
    "gn_constant",
    "gn_ratio",
    "minimize",
    "Potential",
    "constant_potential",
    "multi_well",
    "single_well",
    "zero_potential",
    "run",
    "seminorm_sq",
    "solve_q",
]
