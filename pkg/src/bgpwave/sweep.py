"""Parameter sweeps, the Fisher-KPP comparison, CSV output and flat key = value configs."""
from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import BGPWaveError, NonConvergenceError, OutputError, ParameterError, RegimeError
from .grid import Grid, central_first_derivative
from .kpp import solve_kpp
from .model import ModelParams, SolverConfig
from .wave import CoupledSolution, solve_coupled

logger = logging.getLogger(__name__)

AXES = ("a", "alpha", "rho", "kappa")
PARAM_COLUMNS = ("kappa", "alpha", "rho", "a", "h")
DEFAULT_OUTPUTS = (
    "c", "x0", "gamma", "Q_minus", "Q_plus", "speed_relation_residual",
    "decay_rate_estimate", "decay_rate_theory", "iterations", "inner_iterations",
    "last_residual",
)
SLOPE_LEVELS = tuple(round(0.05 * k, 2) for k in range(1, 20))


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep around a base configuration.

    ``values`` must be strictly increasing. ``warm_start`` chains the solves,
    each starting from the previous solution (cold start if that fails).
    """

    params: ModelParams
    a: float
    h: float
    axis: str
    values: tuple
    cfg: SolverConfig = field(default_factory=SolverConfig)
    outputs: tuple = DEFAULT_OUTPUTS
    warm_start: bool = True

    def __post_init__(self):
        self.params.require_rho()
        if self.axis not in AXES:
            raise ParameterError(f"axis must be one of {AXES}, got {self.axis!r}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ParameterError("sweep needs at least one value")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ParameterError(f"sweep values must be strictly increasing, got {vals}")
        object.__setattr__(self, "values", vals)
        unknown = set(self.outputs) - set(RunRecord.output_names())
        if unknown:
            raise ParameterError(f"unknown output columns {sorted(unknown)}")
        for i in range(len(vals)):
            self.point(i)  # validates every (params, grid) combination up front

    def point(self, i: int):
        """``(params, grid)`` of the i-th sweep value."""
        v = self.values[i]
        if self.axis == "a":
            return self.params, Grid(v, self.h)
        return self.params.with_(**{self.axis: v}), Grid(self.a, self.h)


@dataclass
class RunRecord:
    index: int
    kappa: float
    alpha: float
    rho: float
    a: float
    h: float
    status: str = "ok"
    c: float = math.nan
    x0: float = math.nan
    gamma: float = math.nan
    Q_minus: float = math.nan
    Q_plus: float = math.nan
    speed_relation_residual: float = math.nan
    decay_rate_estimate: float = math.nan
    decay_rate_theory: float = math.nan
    iterations: int = 0
    inner_iterations: int = 0
    last_residual: float = math.nan
    wall_time: float = 0.0
    warm_started: bool = False
    message: str = ""

    @classmethod
    def output_names(cls):
        skip = {"index", "status", *PARAM_COLUMNS}
        return tuple(f.name for f in fields(cls) if f.name not in skip)

    def fill(self, sol: CoupledSolution) -> None:
        d = sol.diagnostics
        self.c, self.x0, self.gamma = d.c, d.x0, d.gamma
        self.Q_minus, self.Q_plus = d.left_value_limit, d.tail_ratio
        self.speed_relation_residual = d.speed_relation_residual
        self.decay_rate_estimate, self.decay_rate_theory = d.decay_rate_estimate, d.decay_rate_theory
        self.iterations, self.inner_iterations = sol.iterations, sol.inner_iterations
        last = sol.history[-1] if sol.history else {}
        self.last_residual = max(last.get("dF", 0.0), last.get("dQtilde", 0.0), last.get("dc", 0.0))


def _last_residual(history) -> float:
    if not history:
        return math.nan
    h = history[-1]
    if isinstance(h, dict):
        return max(h.get("dF", 0.0), h.get("dQtilde", 0.0), h.get("dc", 0.0))
    return float(max(h))


def _solve_point(spec: SweepSpec, i: int, initial: CoupledSolution | None = None):
    """Solve the i-th point; returns ``(record, solution or None)``, never raises solver errors."""
    params, grid = spec.point(i)
    rec = RunRecord(index=i, kappa=params.kappa, alpha=params.alpha, rho=params.rho,
                    a=grid.a, h=grid.h)
    t0 = time.perf_counter()
    sol = None
    attempts = [initial, None] if initial is not None else [None]
    for init in attempts:
        try:
            sol = solve_coupled(grid, params, spec.cfg, initial=init)
            rec.status, rec.message, rec.warm_started = "ok", "", init is not None
            rec.fill(sol)
            break
        except NonConvergenceError as exc:
            rec.status, rec.message = "nonconvergence", str(exc)
            rec.last_residual = _last_residual(exc.history)
            rec.iterations = len(exc.history)
        except RegimeError as exc:
            rec.status, rec.message = "regime", str(exc)
        except BGPWaveError as exc:
            rec.status, rec.message = "error", f"{type(exc).__name__}: {exc}"
        if init is not None:
            logger.info("warm start failed for %s = %g (%s); retrying cold",
                        spec.axis, spec.values[i], rec.status)
    rec.wall_time = time.perf_counter() - t0
    logger.info("%s = %g: %s c=%.8g x0=%.6g (%.1fs)", spec.axis, spec.values[i], rec.status,
                rec.c, rec.x0, rec.wall_time)
    return rec, sol


def _cold_job(args):
    spec, i = args
    return _solve_point(spec, i)[0]


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[RunRecord]:
    """One record per sweep value, in input order.

    Warm-started sweeps are a single chain and run sequentially; cold sweeps
    are dispatched to ``workers`` processes. Either way the records do not
    depend on ``workers``.
    """
    n = len(spec.values)
    if spec.warm_start:
        if workers > 1:
            logger.info("warm-started sweep runs as one chain; ignoring workers=%d", workers)
        records, prev = [], None
        for i in range(n):
            rec, sol = _solve_point(spec, i, prev)
            records.append(rec)
            prev = sol if sol is not None else prev
        return records
    if workers <= 1:
        return [_solve_point(spec, i)[0] for i in range(n)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_cold_job, [(spec, i) for i in range(n)]))


def check_trends(records: list[RunRecord], axis: str) -> list[tuple[str, bool, str]]:
    """Monotone trends along the axis: ``(name, holds, detail)`` per check.

    rho: c and x0 strictly decreasing; alpha: c strictly increasing; kappa: c
    and x0 strictly increasing; a: x0 settles, |x0(last) - x0(second last)| <= 0.1.
    Rows that did not converge make every check fail.
    """
    ok_rows = all(r.status == "ok" for r in records)
    bad = [] if ok_rows else [f"{r.index}:{r.status}" for r in records if r.status != "ok"]

    def mono(col, sign):
        vals = [getattr(r, col) for r in records]
        diffs = np.diff(vals)
        holds = ok_rows and bool(np.all(sign * diffs > 0))
        word = "increasing" if sign > 0 else "decreasing"
        detail = ", ".join(f"{v:.6g}" for v in vals) + (f" (failed rows {bad})" if bad else "")
        return (f"{col} strictly {word} in {axis}", holds, detail)

    if axis == "rho":
        return [mono("c", -1), mono("x0", -1)]
    if axis == "alpha":
        return [mono("c", +1)]
    if axis == "kappa":
        return [mono("c", +1), mono("x0", +1)]
    if axis == "a":
        if len(records) < 2:
            return [("x0 settles in a", False, "needs two rows")]
        d = abs(records[-1].x0 - records[-2].x0)
        return [("x0 settles in a", ok_rows and d <= 0.1,
                 f"|x0({records[-1].a:g}) - x0({records[-2].a:g})| = {d:.4g}")]
    raise ParameterError(f"unknown axis {axis!r}")


def level_slope(F, grid: Grid, level: float) -> float:
    """Slope of a decreasing profile where it first drops through ``level``, interpolated linearly."""
    F = np.asarray(F, dtype=float)
    below = np.flatnonzero(F <= level)
    if below.size == 0 or below[0] == 0:
        raise ParameterError(f"profile does not cross level {level} inside the grid")
    j = int(below[0])
    t = (F[j - 1] - level) / (F[j - 1] - F[j])
    dF = central_first_derivative(F, grid)
    return float(dF[j - 1] + t * (dF[j] - dF[j - 1]))


@dataclass
class KppComparison:
    x: np.ndarray
    F_coupled: np.ndarray
    F_kpp: np.ndarray
    c_coupled: float
    c_kpp: float
    slopes: list  # (level, slope_coupled, slope_kpp)
    coupled: CoupledSolution = field(repr=False, default=None)

    def pair_columns(self) -> dict:
        return {"x": self.x, "F_coupled": self.F_coupled, "F_kpp": self.F_kpp}

    def slope_rows(self) -> list[dict]:
        return [{"level": l, "slope_coupled": sc, "slope_kpp": sk} for l, sc, sk in self.slopes]


def compare_kpp(params: ModelParams, grid: Grid, cfg: SolverConfig | None = None, *,
                freeze_policy: bool = False, levels=SLOPE_LEVELS, backend=None) -> KppComparison:
    """Coupled wave and Fisher-KPP wave on the same grid, with level slopes of both."""
    cfg = cfg or SolverConfig()
    kpp = solve_kpp(grid, params, cfg, backend=backend)
    sol = solve_coupled(grid, params, cfg, kpp=kpp, freeze_policy=freeze_policy, backend=backend)
    slopes = [(float(l), level_slope(sol.F, grid, l), level_slope(kpp.F, grid, l)) for l in levels]
    return KppComparison(x=grid.x, F_coupled=sol.F, F_kpp=kpp.F, c_coupled=sol.c, c_kpp=kpp.c,
                         slopes=slopes, coupled=sol)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def emit_csv(data, path, columns=None) -> None:
    """Write a CSV file: header row, then rows in input order, floats in shortest round-trip form.

    ``data`` is either a mapping of column name to equal-length arrays (profile
    files) or a sequence of :class:`RunRecord` or dicts (one row each). For
    records, ``columns`` defaults to the parameter columns, the default outputs
    and ``status``.
    """
    if isinstance(data, dict):
        cols = list(columns or data.keys())
        arrays = [np.asarray(data[c]) for c in cols]
        if len({len(a) for a in arrays}) > 1:
            raise ParameterError("profile columns have different lengths")
        rows = zip(*arrays)
    else:
        items = [vars(r) if isinstance(r, RunRecord) else dict(r) for r in data]
        if columns is None:
            columns = (list(items[0].keys()) if items and not isinstance(data[0], RunRecord)
                       else [*PARAM_COLUMNS, *DEFAULT_OUTPUTS, "status"])
        cols = list(columns)
        rows = ([item[c] for c in cols] for item in items)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def sweep_columns(spec: SweepSpec) -> list[str]:
    return [*PARAM_COLUMNS, *spec.outputs, "status"]


def read_csv_columns(path) -> dict:
    """Read a numeric CSV written by :func:`emit_csv` back into float arrays by column."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    header, body = rows[0], rows[1:]
    return {name: np.array([float(r[j]) for r in body]) for j, name in enumerate(header)}


CONFIG_KEYS = {
    "kappa": float, "alpha": float, "rho": float, "a": float, "h": float,
    "tol": float, "tol_profile": float, "tol_speed": float,
    "max_inner": int, "max_inner_coupled": int, "max_outer": int, "max_speed_iters": int,
    "inner_tol_ratio": float,
    "relaxation": float, "min_relaxation": float, "source_form": str,
    "adaptive_relaxation": "bool", "check_regime": "bool", "warm_start": "bool",
    "axis": str, "values": "list", "workers": int,
}
SOLVER_KEYS = ("tol_profile", "tol_speed", "max_inner", "max_inner_coupled", "inner_tol_ratio",
               "max_outer", "max_speed_iters", "relaxation", "min_relaxation", "source_form",
               "adaptive_relaxation", "check_regime")


def _convert(key, raw):
    kind = CONFIG_KEYS[key]
    try:
        if kind == "bool":
            low = raw.lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError(raw)
            return low in ("1", "true", "yes", "on")
        if kind == "list":
            return [float(v) for v in raw.replace(",", " ").split()]
        return kind(raw)
    except ValueError:
        raise ParameterError(f"bad value for {key}: {raw!r}") from None


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Later keys override earlier ones."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ParameterError(f"{source}:{lineno}: unknown key {key!r}")
        if key == "tol":
            out["tol_profile"] = out["tol_speed"] = _convert(key, raw)
        else:
            out[key] = _convert(key, raw)
    return out


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OutputError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return parse_config(text, str(path))


def solver_config(values: dict, base: SolverConfig | None = None) -> SolverConfig:
    return (base or SolverConfig()).with_(**{k: values[k] for k in SOLVER_KEYS if k in values})
