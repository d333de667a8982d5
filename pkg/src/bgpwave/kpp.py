"""Fisher-KPP profile on [-a, a] with the speed fixed by the normalization F(0) = 1/2.

Every sweep solves the linear two-point problem

    -c F' - kappa F'' + alpha F_prev w F = alpha F_prev (1 + S)

with F(-a) = 1 and the linearized-tail value F(a) = exp(-beta(c) a)/2. For
the plain KPP problem ``w = 1`` and ``S = 0``, i.e. the reaction
``alpha F_prev (1 - F)``; the coupled solver supplies its own ``w`` and ``S``.
The speed is re-solved on every sweep so that each iterate satisfies the
normalization; a fixed-speed iteration has a near-neutral translation mode
and stalls.
"""
from __future__ import annotations

import logging
import math

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import NonConvergenceError, NoWaveError, ParameterError
from .grid import Grid
from .model import ModelParams, SolverConfig, WaveProfile

logger = logging.getLogger(__name__)

C_MIN = 1e-3
_SCAN_POINTS = 64
_SCAN_DOUBLINGS = 6


def beta_of_c(c: float, params: ModelParams) -> float:
    """Decay rate of the linearized tail: the smaller root of ``kappa b^2 - c b + alpha = 0``.

    Below the critical speed ``2 sqrt(kappa alpha)`` the roots are complex and
    their real part ``c / (2 kappa)`` is returned.
    """
    if not c > 0:
        raise ParameterError(f"speed must be positive, got {c}")
    kappa, alpha = params.kappa, params.alpha
    disc = c * c - 4.0 * kappa * alpha
    if disc < 0:
        return c / (2.0 * kappa)
    return (c - math.sqrt(disc)) / (2.0 * kappa)


def relaxed_right_bc(c: float, grid: Grid, params: ModelParams) -> float:
    """Right boundary value ``exp(-beta(c) a) / 2`` used instead of F(a) = 0."""
    return 0.5 * math.exp(-beta_of_c(c, params) * grid.a)


def kpp_initial_profile(grid: Grid) -> np.ndarray:
    """Affine ramp from 1 at -a to 0 at a."""
    return (grid.a - grid.x) / (2.0 * grid.a)


class ProfileSweep:
    """Linear profile sweep with a fixed reaction weight ``w`` and lagged mass ``S(F_prev)``.

    ``weight`` defaults to ones and ``mass`` (a callable F_prev -> S) to zero,
    which is the Fisher-KPP reaction.
    """

    def __init__(self, grid: Grid, params: ModelParams, weight=None, mass=None, backend=None):
        self.grid = grid
        self.params = params
        self.weight = np.ones(grid.n) if weight is None else np.ascontiguousarray(weight, dtype=float)
        self.mass = mass
        self._zeros = np.zeros(grid.n)
        self._k = kernels.get_backend(backend)

    def lagged_mass(self, F_prev) -> np.ndarray:
        if self.mass is None:
            return self._zeros
        return np.ascontiguousarray(self.mass(F_prev), dtype=float)

    def solve(self, F_prev, c, S=None) -> np.ndarray:
        if S is None:
            S = self.lagged_mass(F_prev)
        p = self.params
        return self._k.f_sweep(F_prev, self.weight, S, c, p.kappa, p.alpha, self.grid.h,
                               1.0, relaxed_right_bc(c, self.grid, p))

    def center_residual(self, F_prev, c, S) -> float:
        """``F_next(0) - 1/2`` for speed ``c``."""
        p = self.params
        v = self._k.f_sweep_at(F_prev, self.weight, S, c, p.kappa, p.alpha, self.grid.h,
                               1.0, relaxed_right_bc(c, self.grid, p), self.grid.center)
        return v - 0.5


def kpp_inner_solve(F_prev, c: float, grid: Grid, params: ModelParams) -> np.ndarray:
    """One Fisher-KPP sweep at fixed speed ``c``."""
    F_prev = np.ascontiguousarray(F_prev, dtype=float)
    grid.check(F_prev)
    return ProfileSweep(grid, params).solve(F_prev, c)


def _bracket(r, c_guess, c_hi):
    """Find (lo, hi, r_lo, r_hi) with r_lo >= 0 >= r_hi; ``r`` decreases in c."""
    tried = {}

    def ev(c):
        if c not in tried:
            tried[c] = r(c)
        return tried[c]

    if c_guess is not None and c_guess > C_MIN:
        step = max(0.02 * c_guess, 1e-3)
        lo = hi = c_guess
        r0 = ev(c_guess)
        if r0 == 0.0:
            return c_guess, c_guess, 0.0, 0.0
        # walk towards the sign change with doubling steps
        for _ in range(40):
            if r0 > 0:
                hi = lo + step
                if ev(hi) <= 0:
                    return lo, hi, ev(lo), ev(hi)
                lo = hi
            else:
                lo = max(hi - step, C_MIN)
                if ev(lo) >= 0:
                    return lo, hi, ev(lo), ev(hi)
                if lo == C_MIN:
                    break
                hi = lo
            step *= 2.0
            if hi > c_hi * 2**_SCAN_DOUBLINGS:
                break

    lo, hi = C_MIN, c_hi
    if ev(lo) >= 0 >= ev(hi):
        return lo, hi, ev(lo), ev(hi)
    for k in range(1, _SCAN_DOUBLINGS + 1):
        cs = np.linspace(C_MIN, c_hi * 2**k, _SCAN_POINTS)
        vals = [ev(float(c)) for c in cs]
        for j in range(_SCAN_POINTS - 1):
            if vals[j] >= 0 >= vals[j + 1]:
                return float(cs[j]), float(cs[j + 1]), vals[j], vals[j + 1]
    raise NoWaveError(
        "speed residual F(0) - 1/2 never changes sign",
        residuals={"c_lo": C_MIN, "r_lo": ev(C_MIN), "c_hi": c_hi * 2**_SCAN_DOUBLINGS,
                   "r_hi": ev(float(c_hi * 2**_SCAN_DOUBLINGS))},
    )


def find_speed(sweep: ProfileSweep, F_prev, S, cfg: SolverConfig, c_guess=None) -> float:
    """Speed for which one sweep from ``F_prev`` lands on F(0) = 1/2."""
    p = sweep.params
    r = lambda c: sweep.center_residual(F_prev, c, S)  # noqa: E731
    lo, hi, r_lo, r_hi = _bracket(r, c_guess, p.c_kpp + 1.0)
    if r_lo == 0.0:
        return lo
    if r_hi == 0.0:
        return hi
    c = brentq(r, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
               maxiter=cfg.max_speed_iters)
    if abs(r(c)) > cfg.tol_speed:
        raise NonConvergenceError(f"speed root-find stalled at c={c}, |F(0)-1/2|={abs(r(c)):.3g}")
    return c


class Damping:
    """Relaxation factor that is halved when an iteration oscillates without settling.

    Two triggers: the speed update flips sign ``FLIPS`` times in a row
    without shrinking by ``SHRINK`` (a period-two cycle), or a window of
    ``window`` iterations contains speed reversals while its peak residual is
    not ``DECAY`` below the previous window's (a slower non-decaying cycle).
    Monotone convergence never triggers a cut.
    """

    FLIPS = 4
    SHRINK = 0.8
    DECAY = 0.95

    def __init__(self, omega: float, floor: float, enabled: bool, window: int = 20,
                 label: str = "iteration"):
        self.omega = omega
        self.floor = floor
        self.enabled = enabled
        self.window = window
        self.label = label
        self._last = 0.0
        self._reset()

    def _reset(self):
        self._flips = 0
        self._n = 0
        self._reversals = 0
        self._peak = 0.0
        self._prev_peak = math.inf

    def update(self, residual: float, step: float) -> None:
        if not self.enabled:
            return
        prev, self._last = self._last, step
        reversed_ = step * prev < 0
        self._flips = self._flips + 1 if reversed_ and abs(step) > self.SHRINK * abs(prev) else 0
        self._n += 1
        self._reversals += reversed_
        self._peak = max(self._peak, residual)
        if self._flips >= self.FLIPS:
            self.cut("oscillates")
            return
        if self._n >= self.window:
            stuck = self._reversals >= 2 and self._peak >= self.DECAY * self._prev_peak
            self._prev_peak, self._peak, self._n, self._reversals = self._peak, 0.0, 0, 0
            if stuck:
                self.cut("does not settle")

    def cut(self, reason: str) -> None:
        if self.omega > self.floor:
            self.omega = max(0.5 * self.omega, self.floor)
            logger.info("%s %s: relaxation lowered to %.3g", self.label, reason, self.omega)
        self._reset()


def solve_speed_normalized(sweep: ProfileSweep, F0, grid: Grid, cfg: SolverConfig,
                           c0: float | None = None) -> WaveProfile:
    """Iterate ``sweep`` to a fixed point, re-solving the speed on every sweep.

    Converged when a sweep changes the profile by at most ``tol_profile`` in
    sup-norm and the speed by at most ``tol_profile``. Sweeps are taken in
    full unless the speed starts to oscillate, in which case they are
    under-relaxed (with ``cfg.adaptive_relaxation``); a blend of two
    normalized profiles is still normalized.
    """
    F = np.ascontiguousarray(F0, dtype=float).copy()
    grid.check(F)
    c = c0
    history = []
    damping = Damping(1.0, cfg.min_relaxation, cfg.adaptive_relaxation, window=64,
                      label="profile sweeps")
    for k in range(1, cfg.max_inner + 1):
        S = sweep.lagged_mass(F)
        c_new = find_speed(sweep, F, S, cfg, c_guess=c)
        F_new = sweep.solve(F, c_new, S)
        dF = float(np.max(np.abs(F_new - F)))
        dc = abs(c_new - c) if c is not None else math.inf
        history.append((dF, dc))
        if dF <= cfg.tol_profile and dc <= cfg.tol_profile:
            return WaveProfile(F=F_new, c=c_new, iterations=k)
        if damping.omega < 1.0:
            F_new = F + damping.omega * (F_new - F)
        if c is not None:
            damping.update(max(dF, dc), c_new - c)
        F, c = F_new, c_new
    raise NonConvergenceError(
        f"profile sweeps did not converge in {cfg.max_inner} iterations "
        f"(last |dF|={history[-1][0]:.3g}, |dc|={history[-1][1]:.3g})",
        last=WaveProfile(F=F, c=c, iterations=cfg.max_inner, converged=False),
        history=history,
    )


def solve_kpp(grid: Grid, params: ModelParams, cfg: SolverConfig | None = None,
              F0=None, c0: float | None = None, backend=None) -> WaveProfile:
    """Normalized Fisher-KPP wave on ``grid``, from the affine ramp unless ``F0`` is given."""
    cfg = cfg or SolverConfig()
    F0 = kpp_initial_profile(grid) if F0 is None else F0
    return solve_speed_normalized(ProfileSweep(grid, params, backend=backend), F0, grid, cfg, c0)
