"""Traveling waves (balanced growth paths) of the mean-field knowledge-diffusion system.

Typical use::

    from bgpwave import Grid, ModelParams, solve_coupled
    sol = solve_coupled(Grid(40.0, 0.02), ModelParams(kappa=1.0, alpha=2.0, rho=10.0))
    sol.c, sol.diagnostics.x0
"""
from .errors import (BGPWaveError, DimensionError, InsufficientTailError, NonConvergenceError,
                     NoWaveError, OutputError, ParameterError, RegimeError, SingularSystemError)
from .grid import Grid
from .hjb import analytic_g_solution, hamiltonian_H, policy_S, solve_Qtilde
from .kernels import BACKEND
from .kpp import beta_of_c, kpp_inner_solve, relaxed_right_bc, solve_kpp
from .model import ModelParams, SolverConfig, WaveProfile
from .sweep import SweepSpec, compare_kpp, emit_csv, run_sweep
from .wave import CoupledSolution, Diagnostics, coupled_F_inner, estimate_decay_rate, solve_coupled

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BGPWaveError", "CoupledSolution", "Diagnostics", "DimensionError", "Grid",
    "InsufficientTailError", "ModelParams", "NoWaveError", "NonConvergenceError", "OutputError",
    "ParameterError", "RegimeError", "SingularSystemError", "SolverConfig", "SweepSpec",
    "WaveProfile", "analytic_g_solution", "beta_of_c", "compare_kpp", "coupled_F_inner",
    "emit_csv", "estimate_decay_rate", "hamiltonian_H", "kpp_inner_solve", "policy_S",
    "relaxed_right_bc", "run_sweep", "solve_Qtilde", "solve_coupled", "solve_kpp",
]
