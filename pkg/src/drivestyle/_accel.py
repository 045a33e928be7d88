"""Optional numba acceleration.

Hot kernels are written twice where it pays off: an explicit-loop version
compiled with :func:`njit` and a vectorised numpy version. Set
``DRIVESTYLE_NUMBA=0`` (or run without numba installed) to force the numpy
path. The flag is read once at import time.
"""

from __future__ import annotations

import os
import warnings

_FLAG = os.environ.get("DRIVESTYLE_NUMBA", "1").strip().lower()
_REQUESTED = _FLAG not in {"0", "false", "no", "off"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - depends on environment
    _numba = None
    if _REQUESTED:
        warnings.warn("numba not installed; using the numpy kernels", RuntimeWarning)

USE_NUMBA = _REQUESTED and _numba is not None


def njit(func):
    """Compile ``func`` with numba when enabled, otherwise return it unchanged.

    The undecorated function stays reachable as ``func.py_func`` in both cases
    so tests can exercise the interpreted path.
    """
    if USE_NUMBA:
        return _numba.njit(cache=True, nogil=True)(func)
    func.py_func = func
    return func


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
