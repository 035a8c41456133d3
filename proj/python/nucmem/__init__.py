"""Squeezing transfer between a cavity field and helium-3 spins."""

from ._core import (
    PhysicalParams,
    Scenario,
    analytic_variances,
    best_quadrature,
    build_full_system,
    gamma_sweep,
    invariant_suite,
    matched_point,
    operating_point,
    quadrature_variances,
    steady_moments,
)

__all__ = [
    "PhysicalParams",
    "Scenario",
    "analytic_variances",
    "best_quadrature",
    "build_full_system",
    "gamma_sweep",
    "invariant_suite",
    "matched_point",
    "operating_point",
    "quadrature_variances",
    "steady_moments",
]
