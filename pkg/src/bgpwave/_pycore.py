"""Pure-Python kernels, used when the compiled ``_core`` extension is unavailable.

Same signatures and the same floating-point operation order as ``_core.pyx``,
so both backends give identical results; this one is only slower.
"""
import numpy as np

from .errors import SingularSystemError


def thomas(sub, diag, sup, rhs):
    """Thomas elimination for sub[i]*u[i-1] + diag[i]*u[i] + sup[i]*u[i+1] = rhs[i]."""
    sub = np.asarray(sub, dtype=float).tolist()
    diag = np.asarray(diag, dtype=float).tolist()
    sup = np.asarray(sup, dtype=float).tolist()
    rhs = np.asarray(rhs, dtype=float).tolist()
    n = len(diag)
    if diag[0] == 0.0:
        raise SingularSystemError("zero pivot in row 0", row=0)
    cp = [0.0] * n
    x = [0.0] * n
    cp[0] = sup[0] / diag[0]
    x[0] = rhs[0] / diag[0]
    for i in range(1, n):
        denom = diag[i] - sub[i] * cp[i - 1]
        if denom == 0.0:
            raise SingularSystemError(f"zero pivot in row {i}", row=i)
        cp[i] = sup[i] / denom if i < n - 1 else 0.0
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / denom
    for i in range(n - 2, -1, -1):
        x[i] = x[i] - cp[i] * x[i + 1]
    return np.array(x)


def _f_eliminate(fprev, w, S, c, kappa, alpha, h, f_left):
    n = len(fprev)
    lo = -kappa / (h * h) + c / (2.0 * h)
    up = -kappa / (h * h) - c / (2.0 * h)
    d0 = 2.0 * kappa / (h * h)
    cp = [0.0] * n
    dp = [0.0] * n
    dp[0] = f_left
    for i in range(1, n - 1):
        denom = d0 + alpha * fprev[i] * w[i] - lo * cp[i - 1]
        if denom == 0.0:
            raise SingularSystemError(f"zero pivot in row {i}", row=i)
        cp[i] = up / denom
        dp[i] = (alpha * fprev[i] * (1.0 + S[i]) - lo * dp[i - 1]) / denom
    return cp, dp


def f_sweep(fprev, w, S, c, kappa, alpha, h, f_left, f_right):
    """One semi-implicit sweep of the wave-profile equation (Dirichlet ends)."""
    fprev = np.asarray(fprev, dtype=float).tolist()
    cp, x = _f_eliminate(fprev, np.asarray(w, float).tolist(),
                         np.asarray(S, float).tolist(), c, kappa, alpha, h, f_left)
    n = len(fprev)
    x[n - 1] = f_right
    for i in range(n - 2, 0, -1):
        x[i] = x[i] - cp[i] * x[i + 1]
    x[0] = f_left
    return np.array(x)


def f_sweep_at(fprev, w, S, c, kappa, alpha, h, f_left, f_right, index):
    """Value at ``index`` of :func:`f_sweep`; back substitution stops there."""
    fprev = np.asarray(fprev, dtype=float).tolist()
    n = len(fprev)
    if index <= 0:
        return f_left
    if index >= n - 1:
        return f_right
    cp, dp = _f_eliminate(fprev, np.asarray(w, float).tolist(),
                          np.asarray(S, float).tolist(), c, kappa, alpha, h, f_left)
    xi = f_right
    for i in range(n - 2, index - 1, -1):
        xi = dp[i] - cp[i] * xi
    return xi
