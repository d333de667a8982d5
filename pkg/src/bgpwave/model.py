"""Model parameters, solver settings and the wave-profile result type."""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class ModelParams:
    """Diffusivity ``kappa``, search effectiveness ``alpha`` and discount rate ``rho``.

    ``rho`` may be left as ``None`` for the decoupled Fisher-KPP problem, which
    does not involve the value function.
    """

    kappa: float
    alpha: float
    rho: float | None = None

    def __post_init__(self):
        for name in ("kappa", "alpha"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be a positive finite number, got {v!r}")
        if self.rho is not None:
            if not (math.isfinite(self.rho) and self.rho > 0):
                raise ParameterError(f"rho must be a positive finite number, got {self.rho!r}")
            if self.rho <= self.kappa:
                raise ParameterError(
                    f"rho={self.rho} must exceed kappa={self.kappa}: the value function "
                    "grows like e^x/(rho - kappa) on the right"
                )
            if self.alpha <= self.kappa:
                warnings.warn(
                    f"alpha={self.alpha} <= kappa={self.kappa}: outside the regime where "
                    "traveling waves are known to exist; the solver will try anyway",
                    RuntimeWarning,
                    stacklevel=3,
                )

    @property
    def c_kpp(self) -> float:
        """Minimal Fisher-KPP speed ``2 sqrt(kappa alpha)``."""
        return 2.0 * math.sqrt(self.kappa * self.alpha)

    def require_rho(self) -> float:
        if self.rho is None:
            raise ParameterError("the coupled problem needs a discount rate rho")
        return self.rho

    def with_(self, **changes) -> ModelParams:
        return replace(self, **changes)


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration caps.

    ``max_inner`` caps profile sweeps per speed-normalized solve and
    ``max_inner_coupled`` per outer step of the coupled loop, whose profile
    solves run at ``inner_tol_ratio * tol_profile`` so that a small outer
    increment is not just an under-solved inner step;
    ``max_speed_iters`` the root-finding steps per sweep and ``max_outer``
    the coupled fixed-point iterations. ``relaxation`` is the initial damping
    factor of the coupled loop; with ``adaptive_relaxation`` it is halved
    (down to ``min_relaxation``) whenever the loop oscillates or stalls.
    ``source_form`` selects how the accumulated search mass is discretized:
    ``"smooth"`` integrates by parts with the derivative of s* over the
    whole grid, ``"anchored"`` starts the sum at the transition node with
    the derivative of R.
    """

    tol_profile: float = 1e-8
    tol_speed: float = 1e-8
    max_inner: int = 20000
    max_inner_coupled: int = 2000
    inner_tol_ratio: float = 0.01
    max_speed_iters: int = 100
    max_outer: int = 300
    relaxation: float = 1.0
    adaptive_relaxation: bool = True
    min_relaxation: float = 0.05
    source_form: str = "smooth"
    check_regime: bool = True

    def __post_init__(self):
        for name in ("tol_profile", "tol_speed"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be > 0")
        for name in ("max_inner", "max_inner_coupled", "max_speed_iters", "max_outer"):
            if int(getattr(self, name)) < 1:
                raise ParameterError(f"{name} must be >= 1")
        if not 0.0 < self.relaxation <= 1.0:
            raise ParameterError(f"relaxation must lie in (0, 1], got {self.relaxation}")
        if not 0.0 < self.inner_tol_ratio <= 1.0:
            raise ParameterError(f"inner_tol_ratio must lie in (0, 1], got {self.inner_tol_ratio}")
        if not 0.0 < self.min_relaxation <= 1.0:
            raise ParameterError(f"min_relaxation must lie in (0, 1], got {self.min_relaxation}")
        if self.source_form not in ("smooth", "anchored"):
            raise ParameterError(f"source_form must be 'smooth' or 'anchored', got {self.source_form!r}")

    def with_(self, **changes) -> SolverConfig:
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class WaveProfile:
    """Profile ``F`` on the grid and its speed ``c``; ``iterations`` counts sweeps."""

    F: np.ndarray
    c: float
    iterations: int = 0
    converged: bool = True
