"""Value function of the wave-frame HJB equation, the envelope H and the search policy S*.

The value equation on [-a, a] is

    (rho - c) Q + c Q' - kappa Q'' = e^x H(R),   Q'(-a) = 0,  Q'(a) = Q(a),

solved for the bounded unknown ``Qtilde = g Q`` (see :mod:`bgpwave.rescaling`).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, RegimeError
from .grid import Grid, Robin, assemble_operator, solve_tridiagonal
from .model import ModelParams
from .rescaling import RescaleTables, build_g_tables, build_phi_tables

logger = logging.getLogger(__name__)


@dataclass
class ValueProfile:
    Qtilde: np.ndarray
    Q: np.ndarray
    Qprime: np.ndarray


def hamiltonian_H(r):
    """``max_s (1 - s^2) + 2 s r`` over s in [0, 1]: 1, 1 + r^2 or 2r."""
    r = np.asarray(r, dtype=float)
    out = np.where(r > 1.0, 2.0 * r, np.where(r >= 0.0, 1.0 + r * r, 1.0))
    return out if out.ndim else float(out)


def policy_S(r):
    """Maximizer of the envelope: ``r`` clamped to [0, 1]."""
    out = np.clip(np.asarray(r, dtype=float), 0.0, 1.0)
    return out if out.ndim else float(out)


def recover_Q(Qtilde, grid: Grid, tables: RescaleTables):
    """Q = Qtilde/g and Q' = Qtilde'/g - g1 Qtilde/g^2 with a central Qtilde'.

    End values of Qtilde' come from the boundary conditions, so ``Q'(-a) = 0``
    and ``Q'(a) = Q(a)`` hold exactly.
    """
    g, g1 = tables.g, tables.g1
    dQt = np.empty_like(Qtilde)
    dQt[1:-1] = (Qtilde[2:] - Qtilde[:-2]) / (2.0 * grid.h)
    dQt[0] = g1[0] / g[0] * Qtilde[0]
    dQt[-1] = 0.0
    Q = Qtilde / g
    Qprime = dQt / g - g1 / (g * g) * Qtilde
    Qprime[0] = 0.0
    return Q, Qprime


def solve_Qtilde(R, c: float, grid: Grid, params: ModelParams,
                 tables: RescaleTables | None = None, *, source=None,
                 check_regime: bool = True) -> ValueProfile:
    """Solve the rescaled value equation for speed ``c`` and benefit ``R``.

    ``source``, when given, replaces the right side ``e^x H(R)`` of the
    unrescaled equation (``R`` is then ignored); used by oracle tests.
    With ``check_regime=False`` a non-positive ``phi1`` is only logged
    and the (then non-monotone) linear system is solved anyway.
    """
    params.require_rho()
    if tables is None or tables.phi1 is None:
        tables = build_phi_tables(tables or build_g_tables(grid), c, params)
    x = grid.x
    if source is None:
        R = np.asarray(R, dtype=float)
        grid.check(R)
        source = np.exp(x) * hamiltonian_H(R)
    else:
        source = np.asarray(source, dtype=float)
        grid.check(source)
    phi1 = tables.phi1
    bad = np.flatnonzero(phi1 <= 0)
    if bad.size:
        i = int(bad[np.argmin(phi1[bad])])
        if check_regime:
            raise RegimeError(
                f"phi1 = {phi1[i]:.4g} <= 0 at x = {x[i]:.4g} (c = {c:.6g}, rho = {params.rho}); "
                "the rescaled value equation loses its comparison principle",
                index=i, x=float(x[i]),
            )
        logger.debug("phi1 = %.4g <= 0 at x = %.4g (c = %.6g, rho = %g); solving anyway",
                     phi1[i], x[i], c, params.rho)
    elif phi1.min() < 1e-3 * params.rho:
        logger.warning("phi1 min %.3g is small: value solve is ill-conditioned", phi1.min())

    sigma = tables.g1[0] / tables.g[0]
    system = assemble_operator(
        grid, params.kappa, tables.phi2, phi1, tables.g * source,
        left=Robin(sigma), right=Robin(0.0), name="rescaled value equation",
    )
    Qtilde = solve_tridiagonal(system)
    Q, Qprime = recover_Q(Qtilde, grid, tables)
    return ValueProfile(Qtilde=Qtilde, Q=Q, Qprime=Qprime)


@dataclass(frozen=True)
class ClosedFormConstants:
    """Exponents and coefficients of ``z1 e^{l1 x} + z2 e^{-l2 x} + e^x/(rho - kappa)``.

    The log-magnitudes and signs are kept because the coefficients under- or
    overflow for realistic ``a``.
    """

    lambda1: float
    lambda2: float
    log_z1: float
    sign_z1: float
    log_z2: float
    sign_z2: float

    @property
    def z1(self) -> float:
        return self.sign_z1 * math.exp(self.log_z1)

    @property
    def z2(self) -> float:
        return self.sign_z2 * math.exp(self.log_z2)


def closed_form_constants(c: float, a: float, params: ModelParams) -> ClosedFormConstants:
    """Constants of the exact solution of ``(rho-c) G + c G' - kappa G'' = e^x`` with Q's end conditions."""
    rho, kappa = params.require_rho(), params.kappa
    if not rho > c:
        raise ParameterError(f"closed form needs rho > c, got rho={rho}, c={c}")
    root = math.sqrt(c * c + 4.0 * kappa * (rho - c))
    l1 = (c + root) / (2.0 * kappa)
    l2 = (-c + root) / (2.0 * kappa)
    if abs(l1 - 1.0) < 1e-12:
        raise ParameterError("closed form is singular for lambda1 = 1")
    decay = math.exp(-2.0 * (l1 + l2) * a)
    b1 = l2 * (l1 - 1.0) / (l2 + 1.0) - l1 * decay
    b2 = l2 - l1 * (l2 + 1.0) / (l1 - 1.0) * decay
    base = -a - math.log(rho - kappa)
    return ClosedFormConstants(
        lambda1=l1, lambda2=l2,
        log_z1=base - (l1 + 2.0 * l2) * a - math.log(abs(b1)), sign_z1=math.copysign(1.0, b1),
        log_z2=base - l2 * a - math.log(abs(b2)), sign_z2=math.copysign(1.0, b2),
    )


def analytic_g_solution(c: float, grid: Grid, params: ModelParams) -> np.ndarray:
    """Closed-form lower-barrier solution (unit source ``e^x``) on the grid."""
    k = closed_form_constants(c, grid.a, params)
    x = grid.x
    return (k.sign_z1 * np.exp(k.log_z1 + k.lambda1 * x)
            + k.sign_z2 * np.exp(k.log_z2 - k.lambda2 * x)
            + np.exp(x) / (params.rho - params.kappa))
