"""Exception hierarchy shared by the solver modules and mapped to CLI exit codes."""


class BGPWaveError(Exception):
    """Base class for every error raised by :mod:`bgpwave`."""


class DimensionError(BGPWaveError, ValueError):
    """Array lengths do not match the grid or each other."""


class ParameterError(BGPWaveError, ValueError):
    """Invalid model parameters or grid, or parameters outside the solvable regime."""


class RegimeError(ParameterError):
    """A coefficient that must stay positive (e.g. ``phi1``) does not.

    ``index`` and ``x`` locate the offending grid point when known.
    """

    def __init__(self, message, index=None, x=None):
        super().__init__(message)
        self.index = index
        self.x = x


class SingularSystemError(BGPWaveError, ArithmeticError):
    """Zero pivot met during tridiagonal elimination."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class NoWaveError(BGPWaveError):
    """The speed residual never changes sign, so no normalized profile exists."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


class NonConvergenceError(BGPWaveError):
    """An iteration cap was hit.

    ``last`` holds the final iterate (whatever object the failing loop works
    with) and ``history`` the residual trace, for post-mortem inspection.
    """

    def __init__(self, message, last=None, history=None):
        super().__init__(message)
        self.last = last
        self.history = list(history or [])


class InsufficientTailError(BGPWaveError):
    """The fit window for the tail decay rate holds fewer than two usable points."""


class OutputError(BGPWaveError, OSError):
    """Reading a configuration or writing a result file failed; the message names the path."""
