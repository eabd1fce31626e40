"""Kernel backend selection.

Two interchangeable kernel module implementations exist: numba-jitted loops
(fast, compiled on first use) and pure numpy (no compilation, no extra
dependency at runtime). The active one is picked at import time from the
ORDSUB_BACKEND environment variable and can be switched programmatically
with select().

    ORDSUB_BACKEND=auto    use numba if importable, else numpy (default)
    ORDSUB_BACKEND=numba   require numba, raise if unavailable
    ORDSUB_BACKEND=numpy   always use the pure-numpy kernels
"""

import os
import warnings

from . import _kernels_numpy

ENV_VAR = "ORDSUB_BACKEND"
_CHOICES = ("auto", "numba", "numpy")

_active = _kernels_numpy
_active_name = "numpy"


def select(name: str | None = None) -> str:
    """Activate a kernel backend and return its resolved name.

    With no argument, re-reads ORDSUB_BACKEND (defaulting to "auto").
    """
    global _active, _active_name
    if name is None:
        name = os.environ.get(ENV_VAR, "auto")
    name = name.strip().lower()
    if name not in _CHOICES:
        raise ValueError(
            f"unknown backend {name!r}: expected one of {', '.join(_CHOICES)}")
    if name == "numpy":
        _active, _active_name = _kernels_numpy, "numpy"
        return _active_name
    try:
        from . import _kernels_numba
    except ImportError as exc:
        if name == "numba":
            raise ImportError(
                "backend 'numba' was requested but numba is not importable"
            ) from exc
        warnings.warn("numba unavailable, falling back to the numpy backend",
                      RuntimeWarning, stacklevel=2)
        _active, _active_name = _kernels_numpy, "numpy"
        return _active_name
    _active, _active_name = _kernels_numba, "numba"
    return _active_name


def active_name() -> str:
    return _active_name


def coverage_values(pi, theta, p_sat, seqs):
    return _active.coverage_values(pi, theta, p_sat, seqs)


def overlap_values(kind, alpha, target, rows, weights, quality, lam, seqs):
    return _active.overlap_values(kind, alpha, target, rows, weights, quality,
                                  lam, seqs)


def kl_values(p, qrows, weights, seqs):
    return _active.kl_values(p, qrows, weights, seqs)


select()
