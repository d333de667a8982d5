"""Uniform-grid discrete calculus on [-a, a]: differences, trapezoid sums, tridiagonal solves."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import DimensionError, ParameterError

logger = logging.getLogger(__name__)

__all__ = [
    "Grid",
    "Dirichlet",
    "Robin",
    "TridiagonalSystem",
    "assemble_operator",
    "central_first_derivative",
    "central_second_derivative",
    "cumulative_trapezoid",
    "solve_tridiagonal",
    "tail_trapezoid",
    "trapezoid",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid x_i = -a + i*h, i = 0..n-1, with x = 0 on a node.

    ``2a/h`` must be an even integer (to 1e-9 relative); the node count is
    ``n = 2a/h + 1`` and the node at x = 0 is ``center``.
    """

    a: float
    h: float

    def __post_init__(self):
        a, h = float(self.a), float(self.h)
        if not (np.isfinite(a) and np.isfinite(h)) or a <= 0 or h <= 0:
            raise ParameterError(f"grid needs a > 0 and h > 0, got a={a}, h={h}")
        cells = 2.0 * a / h
        k = round(cells)
        if abs(cells - k) > 1e-9 * max(cells, 1.0) or k % 2:
            raise ParameterError(
                f"2a/h = {cells!r} is not an even integer; x = 0 must be a grid node"
            )
        if k + 1 < 5:
            raise ParameterError(f"grid has {k + 1} points, need at least 5")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return int(round(2.0 * self.a / self.h)) + 1

    @property
    def center(self) -> int:
        return self.n // 2

    @cached_property
    def x(self) -> np.ndarray:
        half = self.center
        x = self.h * (np.arange(self.n) - half)
        x[0], x[-1] = -self.a, self.a
        x.flags.writeable = False
        return x

    def index_of(self, xv: float) -> int:
        """Nearest node index to ``xv`` (clipped to the grid)."""
        return int(np.clip(round((xv + self.a) / self.h), 0, self.n - 1))

    def check(self, *arrays) -> None:
        for u in arrays:
            if np.shape(u) != (self.n,):
                raise DimensionError(f"expected array of length {self.n}, got shape {np.shape(u)}")


def central_first_derivative(u, g: Grid) -> np.ndarray:
    """Central differences inside, second-order one-sided three-point stencils at the ends."""
    u = np.asarray(u, dtype=float)
    g.check(u)
    h = g.h
    du = np.empty_like(u)
    du[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
    du[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
    du[-1] = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)
    return du


def central_second_derivative(u, g: Grid) -> np.ndarray:
    """Three-point second difference inside; ends copy the neighbouring value."""
    u = np.asarray(u, dtype=float)
    g.check(u)
    d2 = np.empty_like(u)
    d2[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / g.h**2
    d2[0], d2[-1] = d2[1], d2[-2]
    return d2


def trapezoid(u, g: Grid, i_from: int = 0, i_to: int | None = None) -> float:
    """Composite trapezoid sum of ``u`` over nodes ``i_from..i_to``."""
    u = np.asarray(u, dtype=float)
    g.check(u)
    if i_to is None:
        i_to = g.n - 1
    if not (0 <= i_from <= i_to <= g.n - 1):
        raise IndexError(f"need 0 <= i_from <= i_to <= {g.n - 1}, got {i_from}, {i_to}")
    if i_from == i_to:
        return 0.0
    seg = u[i_from : i_to + 1]
    return float(g.h * np.sum(0.5 * (seg[:-1] + seg[1:])))


def cumulative_trapezoid(u, g: Grid, start: int = 0) -> np.ndarray:
    """``out[i]`` = trapezoid(u, start, i) for i >= start, zero before ``start``."""
    u = np.asarray(u, dtype=float)
    g.check(u)
    out = np.zeros(g.n)
    if start < g.n - 1:
        cells = g.h * 0.5 * (u[start:-1] + u[start + 1 :])
        out[start + 1 :] = np.cumsum(cells)
    return out


def tail_trapezoid(u, g: Grid) -> np.ndarray:
    """``out[i]`` = trapezoid(u, i, n-1), accumulated from the right end."""
    u = np.asarray(u, dtype=float)
    g.check(u)
    cells = g.h * 0.5 * (u[:-1] + u[1:])
    out = np.zeros(g.n)
    out[:-1] = np.cumsum(cells[::-1])[::-1]
    return out


@dataclass
class TridiagonalSystem:
    """Rows ``sub[i]*u[i-1] + diag[i]*u[i] + sup[i]*u[i+1] = rhs[i]``.

    ``sub[0]`` and ``sup[-1]`` are ignored.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray
    name: str = field(default="system", compare=False)

    def __post_init__(self):
        self.sub = np.ascontiguousarray(self.sub, dtype=float)
        self.diag = np.ascontiguousarray(self.diag, dtype=float)
        self.sup = np.ascontiguousarray(self.sup, dtype=float)
        self.rhs = np.ascontiguousarray(self.rhs, dtype=float)
        n = self.diag.shape
        if self.diag.ndim != 1 or any(a.shape != n for a in (self.sub, self.sup, self.rhs)):
            raise DimensionError(
                "tridiagonal bands and rhs must be 1-D of equal length, got "
                f"{self.sub.shape}, {self.diag.shape}, {self.sup.shape}, {self.rhs.shape}"
            )

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def dominance_margin(self) -> np.ndarray:
        """Per-row ``|diag| - |sub| - |sup|`` (off-band ends excluded)."""
        off = np.abs(self.sub) + np.abs(self.sup)
        off[0] -= abs(self.sub[0])
        off[-1] -= abs(self.sup[-1])
        return np.abs(self.diag) - off

    def is_diagonally_dominant(self, rtol: float = 1e-12) -> bool:
        """Weak row dominance, allowing a relative slack of ``rtol``."""
        return bool(np.all(self.dominance_margin() >= -rtol * np.abs(self.diag)))

    def matvec(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = self.diag * u
        out[1:] += self.sub[1:] * u[:-1]
        out[:-1] += self.sup[:-1] * u[1:]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub[1:], -1) + np.diag(self.sup[:-1], 1)


def solve_tridiagonal(system: TridiagonalSystem) -> np.ndarray:
    """Solve ``system`` by Thomas elimination (no pivoting); O(n)."""
    return kernels.thomas(system.sub, system.diag, system.sup, system.rhs)


@dataclass(frozen=True)
class Dirichlet:
    value: float


@dataclass(frozen=True)
class Robin:
    """``u' = sigma * u + beta`` at the boundary; ``Robin(0.0)`` is Neumann."""

    sigma: float
    beta: float = 0.0


def assemble_operator(g: Grid, diffusion, drift, reaction, rhs, left, right,
                      name: str = "operator") -> TridiagonalSystem:
    """Assemble ``-diffusion*u'' + drift*u' + reaction*u = rhs`` with central differences.

    Coefficients may be scalars or grid arrays. ``left``/``right`` are
    :class:`Dirichlet` or :class:`Robin`; Robin ends are closed with a ghost
    node eliminated through the central-difference form of the condition,
    which keeps the scheme second order and tridiagonal. Non-dominant
    assemblies are logged, not rejected.
    """
    n, h = g.n, g.h
    kap = np.broadcast_to(np.asarray(diffusion, dtype=float), (n,))
    b = np.broadcast_to(np.asarray(drift, dtype=float), (n,))
    r = np.broadcast_to(np.asarray(reaction, dtype=float), (n,))
    f = np.array(np.broadcast_to(np.asarray(rhs, dtype=float), (n,)))

    lower = -kap / h**2 - b / (2.0 * h)
    upper = -kap / h**2 + b / (2.0 * h)
    diag = 2.0 * kap / h**2 + r
    sub, sup = lower.copy(), upper.copy()
    diag = diag.copy()

    if isinstance(left, Dirichlet):
        diag[0], sup[0], f[0] = 1.0, 0.0, left.value
    else:
        # u_{-1} = u_1 - 2h (sigma u_0 + beta)
        diag[0] -= 2.0 * h * left.sigma * lower[0]
        sup[0] = upper[0] + lower[0]
        f[0] += 2.0 * h * left.beta * lower[0]
    sub[0] = 0.0

    if isinstance(right, Dirichlet):
        diag[-1], sub[-1], f[-1] = 1.0, 0.0, right.value
    else:
        # u_n = u_{n-2} + 2h (sigma u_{n-1} + beta)
        diag[-1] += 2.0 * h * right.sigma * upper[-1]
        sub[-1] = lower[-1] + upper[-1]
        f[-1] -= 2.0 * h * right.beta * upper[-1]
    sup[-1] = 0.0

    system = TridiagonalSystem(sub, diag, sup, f, name=name)
    if not system.is_diagonally_dominant():
        worst = int(np.argmin(system.dominance_margin()))
        logger.debug("%s is not diagonally dominant (worst row %d, x=%.4g)",
                     name, worst, g.x[worst])
    return system
