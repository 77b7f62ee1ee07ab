"""Equilibria of a two-period anticipatory-trading market.

A fast trader observes a noisy preview of a large informed order and
trades ahead of it under a quadratic inventory penalty; dealers price by
Gaussian projection.  This package computes the linear equilibria of
that game, classifies the fast trader's role, verifies candidate
equilibria against independent oracles (polynomial forms, dealer
regressions, Monte Carlo best-response checks), and covers the limit
regimes and a two-asset extension.
"""

from .core import (Equilibrium, Outcomes, Role, check_A_consistency,
                   classify_role, compute_outcomes, derived_coefficients,
                   make_equilibrium, moment_outcomes, pricing_regression,
                   soc_values)
from .errors import (BoundaryNotBracketed, BracketFailure,
                     DegenerateDenominator, HftKyleError, NegativeRadicand,
                     NoConvergence, NoRoot, NotBestResponse,
                     OnlySOCViolating, PDViolation,
                     PredicateMonotoneViolation)
from .limits import (DuopolyEquilibrium, GammaInfLimit, Theta1ZeroLimit,
                     duopoly_outcomes, duopoly_role, find_gamma_tilde,
                     gamma_inf_thresholds, solve_duopoly, solve_gamma_inf,
                     solve_theta1_zero, zeta)
from .montecarlo import (DeviationResult, SimConfig, SimEstimates,
                         best_response_check, simulate)
from .multiasset import (FixedPointConfig, MultiEquilibrium, MultiParams,
                         baseline_full_params, baseline_spillover_params,
                         classify_multi_roles, multi_moment_objectives,
                         simulate_multi, solve_multi_full,
                         solve_multi_spillover)
from .params import ModelParams
from .solver import (SolveReport, SolverConfig, residual_map, solve,
                     system_polynomials)
from .sweeps import (SweepRow, SweepSpec, continuation_jumps,
                     find_benefit_thresholds, find_role_boundaries,
                     harmed_region_findings, run_sweep)

__version__ = "0.1.0"

__all__ = [
    "BoundaryNotBracketed", "BracketFailure", "DegenerateDenominator",
    "DeviationResult", "DuopolyEquilibrium", "Equilibrium",
    "FixedPointConfig", "GammaInfLimit", "HftKyleError", "ModelParams",
    "MultiEquilibrium", "MultiParams", "NegativeRadicand", "NoConvergence",
    "NoRoot", "NotBestResponse", "OnlySOCViolating", "Outcomes",
    "PDViolation", "PredicateMonotoneViolation", "Role", "SimConfig",
    "SimEstimates", "SolveReport", "SolverConfig", "SweepRow", "SweepSpec",
    "Theta1ZeroLimit", "baseline_full_params", "baseline_spillover_params",
    "best_response_check", "check_A_consistency", "classify_multi_roles",
    "classify_role", "compute_outcomes", "continuation_jumps",
    "derived_coefficients", "duopoly_outcomes", "duopoly_role",
    "find_benefit_thresholds", "find_gamma_tilde", "find_role_boundaries",
    "gamma_inf_thresholds", "harmed_region_findings", "make_equilibrium",
    "moment_outcomes", "multi_moment_objectives", "pricing_regression",
    "residual_map", "run_sweep", "simulate", "simulate_multi", "soc_values",
    "solve", "solve_duopoly", "solve_gamma_inf", "solve_multi_full",
    "solve_multi_spillover", "solve_theta1_zero", "system_polynomials",
    "zeta",
]
