"""Coupled traveling-wave solver: outer fixed point over (F, Q, R, s*, c) plus diagnostics."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .coupling import CouplingState, build_coupling, locate_transition, mass_terms
from .errors import InsufficientTailError, NonConvergenceError, RegimeError
from .grid import Grid, central_first_derivative, trapezoid
from .hjb import ValueProfile, recover_Q, solve_Qtilde
from .kpp import Damping, ProfileSweep, solve_kpp, solve_speed_normalized
from .model import ModelParams, SolverConfig, WaveProfile
from .rescaling import build_g_tables, build_phi_tables

logger = logging.getLogger(__name__)

TAIL_FLOOR = 1e-12


@dataclass
class Diagnostics:
    speed_relation_residual: float
    tail_ratio: float
    decay_rate_estimate: float
    decay_rate_theory: float
    left_value_limit: float
    x0: float
    gamma: float
    c: float
    dirichlet_energy: float
    A1: float
    A2: float
    B: float
    phi1_min: float

    def as_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}


@dataclass
class CoupledSolution:
    grid: Grid
    params: ModelParams
    profile: WaveProfile
    value: ValueProfile
    coupling: CouplingState
    diagnostics: Diagnostics
    iterations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)
    inner_iterations: int = 0

    @property
    def c(self) -> float:
        return self.profile.c

    @property
    def F(self) -> np.ndarray:
        return self.profile.F

    def profile_columns(self) -> dict:
        """Grid columns for profile output files."""
        return {
            "x": self.grid.x,
            "F": self.profile.F,
            "Q": self.value.Q,
            "Qtilde": self.value.Qtilde,
            "R": self.coupling.R,
            "s_star": self.coupling.s_star,
        }


def estimate_decay_rate(F, grid: Grid, window=(0.5, 0.75)) -> float:
    """Minus the least-squares slope of ``log F`` over ``[window[0] a, window[1] a]`` where F > 1e-12."""
    F = np.asarray(F, dtype=float)
    grid.check(F)
    x = grid.x
    sel = (x >= window[0] * grid.a) & (x <= window[1] * grid.a) & (F > TAIL_FLOOR)
    if np.count_nonzero(sel) < 2:
        raise InsufficientTailError(
            f"fewer than two points with F > {TAIL_FLOOR:g} in x in "
            f"[{window[0] * grid.a:g}, {window[1] * grid.a:g}]"
        )
    slope = np.polyfit(x[sel], np.log(F[sel]), 1)[0]
    return float(-slope)


def dirichlet_energy(F, grid: Grid) -> float:
    """Trapezoid of ``|F'|^2`` over the grid."""
    dF = central_first_derivative(F, grid)
    return trapezoid(dF * dF, grid)


def value_bounds(Q, grid: Grid):
    """Constants with ``A1 e^x <= Q <= A2 e^x + B`` on the grid.

    ``B`` is the largest value on x <= 0 and ``A2`` the largest ``Q e^{-x}``
    on x >= 0, which suffices when Q is non-decreasing; ``A2`` is enlarged if
    a node still violates the bound.
    """
    x = grid.x
    ratio = Q * np.exp(-x)
    A1 = float(ratio.min())
    left = x <= 0
    B = float(Q[left].max())
    A2 = float(ratio[~left | (x == 0)].max())
    excess = (Q - B) * np.exp(-x)
    A2 = max(A2, float(excess.max()))
    return A1, A2, B


def compute_diagnostics(grid: Grid, params: ModelParams, profile: WaveProfile,
                        value: ValueProfile, state: CouplingState) -> Diagnostics:
    c, kappa = profile.c, params.kappa
    gamma = state.gamma
    x = grid.x
    right_fifth = x >= grid.a - 0.2 * (2.0 * grid.a)
    try:
        decay = estimate_decay_rate(profile.F, grid)
    except InsufficientTailError:
        decay = math.nan
    A1, A2, B = value_bounds(value.Q, grid)
    return Diagnostics(
        speed_relation_residual=abs(c - 2.0 * math.sqrt(kappa * params.alpha * gamma)) / c,
        tail_ratio=float(np.mean(value.Q[right_fifth] * np.exp(-x[right_fifth]))),
        decay_rate_estimate=decay,
        decay_rate_theory=c / (2.0 * kappa),
        left_value_limit=float(value.Q[0]),
        x0=state.x0,
        gamma=gamma,
        c=c,
        dirichlet_energy=dirichlet_energy(profile.F, grid),
        A1=A1, A2=A2, B=B,
        phi1_min=float(build_phi_tables(build_g_tables(grid), c, params).phi1.min()),
    )


def frozen_policy_state(grid: Grid) -> CouplingState:
    """Coupling with ``R = s* = 1`` everywhere: the Fisher-KPP reaction."""
    ones = np.ones(grid.n)
    return CouplingState(Rtilde=np.exp(grid.x), R=ones, s_star=ones,
                         transition=locate_transition(ones, grid), gamma=1.0)


def coupled_F_inner(F_prev, R, s_star, c: float, grid: Grid, params: ModelParams,
                    form: str = "smooth", backend=None) -> np.ndarray:
    """One coupled profile sweep at fixed speed ``c`` for given ``R`` and ``s*``."""
    F_prev = np.ascontiguousarray(F_prev, dtype=float)
    R = np.asarray(R, dtype=float)
    grid.check(F_prev, R, s_star)
    state = CouplingState(Rtilde=np.exp(grid.x) * R, R=R, s_star=np.asarray(s_star, dtype=float),
                          transition=locate_transition(R, grid), gamma=math.nan)
    w, mass = mass_terms(state, grid, form)
    return ProfileSweep(grid, params, w, mass, backend=backend).solve(F_prev, c)


def _value_speed(c: float, params: ModelParams) -> float:
    """Speed used in the value solve: ``c`` capped below ``rho`` so ``phi1`` stays positive."""
    cap = params.rho - 0.1 * (params.rho - params.kappa)
    return min(c, cap)


def solve_coupled(grid: Grid, params: ModelParams, cfg: SolverConfig | None = None, *,
                  initial: CoupledSolution | None = None, kpp: WaveProfile | None = None,
                  freeze_policy: bool = False, backend=None) -> CoupledSolution:
    """Traveling wave of the coupled system on ``grid``.

    Each outer iteration: (i) R, s*, H from the current F and Q; (ii) the
    value equation for the rescaled Q; (iii) the profile equation for F and
    c with the normalization F(0) = 1/2, holding s* fixed. Starts from the
    Fisher-KPP wave and ``Q = e^x / (rho - kappa)`` unless ``initial`` (a previous solution,
    possibly on another grid) is given. ``freeze_policy`` pins s* = 1, which
    reproduces the Fisher-KPP scheme.
    """
    cfg = cfg or SolverConfig()
    params.require_rho()
    t0 = time.perf_counter()
    gtab = build_g_tables(grid)
    x = grid.x

    if initial is not None:
        F = np.interp(x, initial.grid.x, initial.profile.F)
        c = initial.profile.c
        Qtilde = np.interp(x, initial.grid.x, initial.value.Qtilde)
    else:
        if kpp is None:
            kpp = solve_kpp(grid, params, cfg, backend=backend)
        F, c = kpp.F.copy(), kpp.c
        # e^x scaled to the known right-end growth e^x / (rho - kappa)
        Qtilde = gtab.g * np.exp(x) / (params.rho - params.kappa)
    _, Qprime = recover_Q(Qtilde, grid, gtab)

    damping = Damping(cfg.relaxation, min(cfg.min_relaxation, cfg.relaxation),
                      cfg.adaptive_relaxation, label="outer loop")
    inner_cfg = cfg.with_(max_inner=min(cfg.max_inner, cfg.max_inner_coupled),
                          tol_profile=cfg.tol_profile * cfg.inner_tol_ratio)
    history = []
    inner_total = 0
    converged = False
    for it in range(1, cfg.max_outer + 1):
        state = frozen_policy_state(grid) if freeze_policy else build_coupling(Qprime, F, grid, params)
        cq = _value_speed(c, params) if cfg.check_regime else c
        value = solve_Qtilde(state.R, cq, grid, params, build_phi_tables(gtab, cq, params),
                             check_regime=cfg.check_regime)
        w, mass = mass_terms(state, grid, cfg.source_form)
        sweep = ProfileSweep(grid, params, w, mass, backend=backend)
        try:
            wave = solve_speed_normalized(sweep, F, grid, inner_cfg, c0=c)
        except NonConvergenceError as exc:
            if not damping.enabled or exc.last is None:
                exc.history = history + exc.history
                raise
            # every sweep is normalized, so the last one is a usable iterate
            logger.info("outer %d: profile sweeps did not settle; taking the last sweep", it)
            wave = exc.last
            damping.cut("inner solve stalls")
        inner_total += wave.iterations

        omega = damping.omega
        if omega < 1.0:
            F_new = F + omega * (wave.F - F)
            Qt_new = Qtilde + omega * (value.Qtilde - Qtilde)
            c_new = c + omega * (wave.c - c)
        else:
            F_new, Qt_new, c_new = wave.F, value.Qtilde, wave.c
        dF = float(np.max(np.abs(F_new - F)))
        # relative once Qtilde exceeds one: its size depends on rho and the left end
        dQ = float(np.max(np.abs(Qt_new - Qtilde))) / max(1.0, float(np.max(np.abs(Qt_new))))
        dc = abs(c_new - c)
        history.append({"iteration": it, "dF": dF, "dQtilde": dQ, "dc": dc, "c": c_new,
                        "x0": state.x0, "inner": wave.iterations, "relaxation": omega})
        logger.info("outer %d: c=%.10f x0=%.4f dF=%.2e dQ=%.2e dc=%.2e (%d sweeps, omega %.3g)",
                    it, c_new, state.x0, dF, dQ, dc, wave.iterations, omega)
        F, Qtilde = F_new, Qt_new
        c, c_prev = c_new, c
        _, Qprime = recover_Q(Qtilde, grid, gtab)
        tol = cfg.tol_profile
        if dF <= tol and dQ <= tol and dc <= tol:
            converged = True
            break
        damping.update(max(dF, dQ, dc), c - c_prev)

    Q, Qprime = recover_Q(Qtilde, grid, gtab)
    value = ValueProfile(Qtilde=Qtilde, Q=Q, Qprime=Qprime)
    state = frozen_policy_state(grid) if freeze_policy else build_coupling(Qprime, F, grid, params)
    profile = WaveProfile(F=F, c=c, iterations=inner_total, converged=converged)
    sol = CoupledSolution(
        grid=grid, params=params, profile=profile, value=value, coupling=state,
        diagnostics=compute_diagnostics(grid, params, profile, value, state),
        iterations=len(history), converged=converged, history=history,
        inner_iterations=inner_total,
    )
    logger.info("coupled solve %s after %d outer iterations (%.2fs)",
                "converged" if converged else "stopped", len(history), time.perf_counter() - t0)
    if cfg.check_regime and c > _value_speed(c, params):
        raise RegimeError(
            f"the iteration settles at c = {c:.6g}, too close to or above rho = {params.rho}: "
            "no wave with a positive left value limit; rho is below the existence threshold "
            "(check_regime=False, or --no-regime-check on the command line, solves the value "
            "equation at this speed anyway)",
            index=0, x=float(grid.x[0]),
        )
    if not converged:
        last = history[-1]
        raise NonConvergenceError(
            f"coupled iteration did not converge in {cfg.max_outer} iterations "
            f"(dF={last['dF']:.3g}, dQtilde={last['dQtilde']:.3g}, dc={last['dc']:.3g})",
            last=sol, history=history,
        )
    return sol
