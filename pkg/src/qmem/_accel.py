"""Numba switch for the hot kernels.

Kernels are written once as plain numpy/Python functions and wrapped with
:func:`jit`. Setting ``QMEM_NO_NUMBA=1`` (or running without numba installed)
keeps the pure-Python path, which is what the equivalence tests and the
benchmark compare against.
"""

import os

_FLAG = os.environ.get("QMEM_NO_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def jit(func):
    """Compile ``func`` in nopython mode when numba is enabled."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(func)
    return func
