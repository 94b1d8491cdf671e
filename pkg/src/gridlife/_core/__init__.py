"""Kernel selection: compiled simplex when available, numpy otherwise.

Both backends implement the same DenseSimplex contract with the same pivot
rules; they differ only in speed. GRIDLIFE_BACKEND=python forces the numpy
kernel, GRIDLIFE_BACKEND=compiled insists on the extension and fails loudly
when it is missing.
"""

from __future__ import annotations

import os

from . import simplex_py
from .simplex_py import (  # noqa: F401  (shared status/state constants)
    AT_LOWER,
    AT_UPPER,
    BASIC,
    FREE,
    INFEASIBLE,
    ITERATION_LIMIT,
    OPTIMAL,
    UNBOUNDED,
)

_FORCED = os.environ.get("GRIDLIFE_BACKEND", "").strip().lower()

if _FORCED in ("python", "py", "pure"):
    _impl = simplex_py
    _BACKEND = "python"
else:
    try:
        from . import _simplex as _compiled

        _impl = _compiled
        _BACKEND = "compiled"
    except ImportError:
        if _FORCED in ("compiled", "c", "cython"):
            raise ImportError(
                "GRIDLIFE_BACKEND=compiled but the gridlife._core._simplex "
                "extension is not built; reinstall the package with a C "
                "compiler available or unset GRIDLIFE_BACKEND")
        _impl = simplex_py
        _BACKEND = "python"

DenseSimplex = _impl.DenseSimplex


def backend_name() -> str:
    """Name of the kernel in use: 'compiled' or 'python'."""
    return _BACKEND
