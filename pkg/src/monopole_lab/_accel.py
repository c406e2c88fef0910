"""Backend selection for the hot numeric kernels.

Set ``MONOPOLE_LAB_BACKEND=numpy`` to force the pure-numpy/pure-Python
paths; the default is ``numba`` whenever numba imports cleanly.
"""
from __future__ import annotations

import os

BACKEND_ENV = "MONOPOLE_LAB_BACKEND"

try:
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    HAS_NUMBA = False


def _requested_backend() -> str:
    value = os.environ.get(BACKEND_ENV, "numba").strip().lower()
    if value not in ("numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {value!r}")
    return value


USE_NUMBA = HAS_NUMBA and _requested_backend() == "numba"


def njit(func):
    """Compile ``func`` with numba when available; otherwise return it unchanged.

    The uncompiled function is kept on ``.py_func`` either way so callers
    and benchmarks can run the interpreted path explicitly.
    """
    if _njit is None:
        func.py_func = func
        return func
    return _njit(cache=True, fastmath=False)(func)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
