# Compiled kernels. Must stay numerically identical (same operation order)
# to the pure-Python versions in _pycore.py.
import numpy as np

from bgpwave.errors import SingularSystemError


def thomas(const double[::1] sub, const double[::1] diag, const double[::1] sup,
           const double[::1] rhs):
    """Thomas elimination for sub[i]*u[i-1] + diag[i]*u[i] + sup[i]*u[i+1] = rhs[i]."""
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t i
    cdef double denom
    u = np.empty(n)
    cp_arr = np.empty(n)
    cdef double[::1] x = u
    cdef double[::1] cp = cp_arr
    if diag[0] == 0.0:
        raise SingularSystemError("zero pivot in row 0", row=0)
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
    return u


cdef Py_ssize_t _f_eliminate(const double[::1] fprev, const double[::1] w,
                             const double[::1] S, double c, double kappa,
                             double alpha, double h, double f_left,
                             double[::1] cp, double[::1] dp) except -1:
    cdef Py_ssize_t n = fprev.shape[0]
    cdef Py_ssize_t i
    cdef double lo = -kappa / (h * h) + c / (2.0 * h)
    cdef double up = -kappa / (h * h) - c / (2.0 * h)
    cdef double d0 = 2.0 * kappa / (h * h)
    cdef double denom
    cp[0] = 0.0
    dp[0] = f_left
    for i in range(1, n - 1):
        denom = d0 + alpha * fprev[i] * w[i] - lo * cp[i - 1]
        if denom == 0.0:
            raise SingularSystemError(f"zero pivot in row {i}", row=i)
        cp[i] = up / denom
        dp[i] = (alpha * fprev[i] * (1.0 + S[i]) - lo * dp[i - 1]) / denom
    return 0


def f_sweep(const double[::1] fprev, const double[::1] w, const double[::1] S,
            double c, double kappa, double alpha, double h,
            double f_left, double f_right):
    """One semi-implicit sweep of the wave-profile equation (Dirichlet ends)."""
    cdef Py_ssize_t n = fprev.shape[0]
    cdef Py_ssize_t i
    out = np.empty(n)
    cp_arr = np.empty(n)
    cdef double[::1] x = out
    cdef double[::1] cp = cp_arr
    _f_eliminate(fprev, w, S, c, kappa, alpha, h, f_left, cp, x)
    x[n - 1] = f_right
    for i in range(n - 2, 0, -1):
        x[i] = x[i] - cp[i] * x[i + 1]
    x[0] = f_left
    return out


def f_sweep_at(const double[::1] fprev, const double[::1] w, const double[::1] S,
               double c, double kappa, double alpha, double h,
               double f_left, double f_right, Py_ssize_t index):
    """Value at ``index`` of :func:`f_sweep`; back substitution stops there."""
    cdef Py_ssize_t n = fprev.shape[0]
    cdef Py_ssize_t i
    cdef double xi
    cp_arr = np.empty(n)
    dp_arr = np.empty(n)
    cdef double[::1] cp = cp_arr
    cdef double[::1] dp = dp_arr
    if index <= 0:
        return f_left
    if index >= n - 1:
        return f_right
    _f_eliminate(fprev, w, S, c, kappa, alpha, h, f_left, cp, dp)
    xi = f_right
    for i in range(n - 2, index - 1, -1):
        xi = dp[i] - cp[i] * xi
    return xi
