"""Weight g(x) that keeps the value function bounded, and the rescaled-equation coefficients.

With ``Qtilde = g * Q`` the value equation

    (rho - c) Q + c Q' - kappa Q'' = e^x H(R)

becomes ``phi1 Qtilde + phi2 Qtilde' - kappa Qtilde'' = g e^x H(R)``.
``g`` tends to a constant on the left (where Q does) and equals ``e^{-x}`` on
the right (where Q grows like ``e^x``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .grid import Grid

_LEFT_CONST = 1.0 + 2.0 * np.arctan(1.0)


@dataclass(frozen=True)
class RescaleTables:
    x: np.ndarray
    g: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    phi1: np.ndarray | None = None
    phi2: np.ndarray | None = None


def g_weight(x):
    """g, g', g'' at points ``x`` from the closed-form branches (right branch at x = 0)."""
    x = np.asarray(x, dtype=float)
    left = x < 0
    xl = np.where(left, x, 0.0) + 1.0
    q = 1.0 + xl * xl
    er = np.exp(-np.where(left, 0.0, x))
    g = np.where(left, _LEFT_CONST - 2.0 * np.arctan(xl), er)
    g1 = np.where(left, -2.0 / q, -er)
    g2 = np.where(left, 4.0 * xl / (q * q), er)
    return g, g1, g2


def build_g_tables(grid: Grid) -> RescaleTables:
    g, g1, g2 = g_weight(grid.x)
    return RescaleTables(x=grid.x, g=g, g1=g1, g2=g2)


def build_phi_tables(tables: RescaleTables, c: float, params) -> RescaleTables:
    """Attach ``phi1 = rho - c - c g1/g - kappa (2 g1^2 - g g2)/g^2`` and ``phi2 = c + 2 kappa g1/g``."""
    c = float(c)
    if not np.isfinite(c):
        raise ParameterError(f"speed must be finite, got {c}")
    kappa, rho = params.kappa, params.rho
    if rho <= kappa:
        raise ParameterError(f"need rho > kappa for the rescaled value equation, got rho={rho}, kappa={kappa}")
    g, g1, g2 = tables.g, tables.g1, tables.g2
    ratio = g1 / g
    phi1 = rho - c - c * ratio - kappa * (2.0 * g1 * g1 - g * g2) / (g * g)
    phi2 = c + 2.0 * kappa * ratio
    # On x >= 0 the ratios are exactly -1 and +1; pin the constants bit-for-bit.
    right = tables.x >= 0
    phi1 = np.where(right, rho - kappa, phi1)
    phi2 = np.where(right, c - 2.0 * kappa, phi2)
    return RescaleTables(x=tables.x, g=g, g1=g1, g2=g2, phi1=phi1, phi2=phi2)
