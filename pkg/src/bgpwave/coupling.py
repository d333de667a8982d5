"""Nonlocal coupling: expected search benefit R, policy s*, transition point, search mass.

``R(x) = (alpha/2) e^{-x} \\int_x^a Q'(y) F(y) dy`` is accumulated as the bounded
``Rtilde = e^x R`` from the right end, where it vanishes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .grid import Grid, central_first_derivative, cumulative_trapezoid, tail_trapezoid, trapezoid
from .hjb import policy_S
from .model import ModelParams

logger = logging.getLogger(__name__)

MONOTONE_TOL = 1e-6


@dataclass(frozen=True)
class Transition:
    """Where R crosses 1.

    ``side`` is ``"interior"`` when the crossing is on the grid, ``"left"``
    when R < 1 everywhere and ``"right"`` when R >= 1 everywhere. ``index``
    is the last node with R >= 1 (``None`` for ``"left"``).
    """

    x0: float
    index: int | None
    side: str

    @property
    def on_grid(self) -> bool:
        return self.side == "interior"


@dataclass
class CouplingState:
    Rtilde: np.ndarray
    R: np.ndarray
    s_star: np.ndarray
    transition: Transition
    gamma: float

    @property
    def x0(self) -> float:
        return self.transition.x0


def compute_Rtilde(Qprime, F, grid: Grid, params: ModelParams):
    """Return ``(Rtilde, R)`` with ``Rtilde(a) = 0`` and ``Rtilde' = -(alpha/2) Q' F``."""
    Qprime = np.asarray(Qprime, dtype=float)
    F = np.asarray(F, dtype=float)
    grid.check(Qprime, F)
    if Qprime.min() < -MONOTONE_TOL * max(1.0, np.abs(Qprime).max()):
        logger.debug("Q' is negative somewhere (min %.3g); R may lose monotonicity", Qprime.min())
    Rtilde = 0.5 * params.alpha * tail_trapezoid(Qprime * F, grid)
    return Rtilde, np.exp(-grid.x) * Rtilde


def locate_transition(R, grid: Grid) -> Transition:
    """Linear-interpolation crossing of R through 1 after the last node with R >= 1."""
    R = np.asarray(R, dtype=float)
    grid.check(R)
    rise = np.max(np.diff(R))
    if rise > MONOTONE_TOL * max(1.0, abs(R).max() * 1e-12):
        logger.debug("R increases by up to %.3g between nodes", rise)
    above = np.flatnonzero(R >= 1.0)
    if above.size == 0:
        return Transition(x0=-np.inf, index=None, side="left")
    m = int(above[-1])
    if m == grid.n - 1:
        return Transition(x0=np.inf, index=m, side="right")
    r0, r1 = R[m], R[m + 1]
    t = (r0 - 1.0) / (r0 - r1)
    return Transition(x0=float(grid.x[m] + t * grid.h), index=m, side="interior")


def compute_gamma(s_star, F, grid: Grid) -> float:
    """Search mass ``\\int s* (-F') dx`` by trapezoid, clamped to [0, 1 + 1e-6]."""
    s_star = np.asarray(s_star, dtype=float)
    F = np.asarray(F, dtype=float)
    grid.check(s_star, F)
    val = trapezoid(s_star * -central_first_derivative(F, grid), grid)
    return float(np.clip(val, 0.0, 1.0 + 1e-6))


def source_mass(F, R, s_star, m: int | None, i: int, grid: Grid) -> float:
    """Accumulated search mass ``\\int_{-a}^{x_i} s* (-F') dy`` in integrated-by-parts form.

    Left of the transition node ``m`` this is ``1 - F_i``; from ``m`` on it is
    ``1 - F_i s*_i`` plus the trapezoid sum of ``R' F`` from ``m`` to ``i``.
    With no transition on the grid (``m is None``) the direct trapezoid of
    ``s* (-F')`` is returned.
    """
    F = np.asarray(F, dtype=float)
    R = np.asarray(R, dtype=float)
    s_star = np.asarray(s_star, dtype=float)
    grid.check(F, R, s_star)
    if not 0 <= i < grid.n:
        raise IndexError(f"node index {i} outside 0..{grid.n - 1}")
    if m is None:
        return trapezoid(s_star * -central_first_derivative(F, grid), grid, 0, i)
    if not 0 <= m < grid.n:
        raise IndexError(f"transition index {m} outside 0..{grid.n - 1}")
    if i < m:
        return 1.0 - F[i]
    dR = central_first_derivative(R, grid)
    return 1.0 - F[i] * s_star[i] + trapezoid(dR * F, grid, m, i)


def build_coupling(Qprime, F, grid: Grid, params: ModelParams) -> CouplingState:
    Rtilde, R = compute_Rtilde(Qprime, F, grid, params)
    s = policy_S(R)
    return CouplingState(Rtilde=Rtilde, R=R, s_star=s, transition=locate_transition(R, grid),
                         gamma=compute_gamma(s, F, grid))


def mass_terms(state: CouplingState, grid: Grid, form: str = "smooth"):
    """Implicit weight and lagged-mass callable for the coupled profile sweep.

    The sweep's reaction is ``alpha F_prev (1 + S(F_prev) - w F)``, i.e.
    ``1 + S - w F`` is the discrete accumulated search mass with the
    ``-s* F`` part taken implicitly.

    ``"smooth"``: ``w = s*`` and ``1 + S = s*(-a) + cumtrapz(s*' F)``. The
    derivative of s* vanishes left of the transition, so this differs from
    ``"anchored"`` only in the cells around it, but it moves continuously when
    the transition crosses a node.

    ``"anchored"``: ``w = s*`` and ``S`` is the trapezoid sum of ``R' F`` from
    the transition node, zero before it. Falls back to ``"smooth"`` when R < 1
    on the whole grid.
    """
    s = state.s_star
    tr = state.transition
    if form == "anchored" and tr.side != "left":
        m = tr.index
        dR = central_first_derivative(state.R, grid)

        def mass(F_prev):
            return cumulative_trapezoid(dR * F_prev, grid, start=m)

        return s, mass
    if form not in ("smooth", "anchored"):
        raise ValueError(f"unknown source form {form!r}")
    ds = central_first_derivative(s, grid)
    offset = s[0] - 1.0

    def mass(F_prev):
        return offset + cumulative_trapezoid(ds * F_prev, grid)

    return s, mass
