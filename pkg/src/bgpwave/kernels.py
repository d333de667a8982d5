"""Backend selection for the hot kernels.

The compiled ``_core`` extension is used when it imports; otherwise, or when
``BGPWAVE_PURE_PYTHON`` is set to a non-empty value other than ``0``, the
pure-Python ``_pycore`` module is used. ``BACKEND`` names the active one.
"""
import os

from . import _pycore

_force_python = os.environ.get("BGPWAVE_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_python:
        raise ImportError("pure-Python kernels requested")
    from . import _core as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pycore
    BACKEND = "python"

thomas = _impl.thomas
f_sweep = _impl.f_sweep
f_sweep_at = _impl.f_sweep_at


def get_backend(name=None):
    """Return the kernel module for ``name`` (``"cython"`` or ``"python"``); default active."""
    if name is None:
        return _impl
    if name == "python":
        return _pycore
    if name == "cython":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")
