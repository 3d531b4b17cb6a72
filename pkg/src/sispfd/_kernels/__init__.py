"""Simulation kernel backends.

The compiled extension is preferred when it imported cleanly; otherwise the
NumPy implementation takes over.  Both expose the same three functions with
identical semantics.  Set SIS_PFD_FORCE_FALLBACK=1 to use the NumPy backend
even when the extension is available.
"""

from __future__ import annotations

import os

from . import _mc_numpy

FORCE_FALLBACK_ENV_VAR = "SIS_PFD_FORCE_FALLBACK"

_BACKENDS = {"numpy": _mc_numpy}

try:
    from . import _mc_cython
except ImportError:
    _mc_cython = None
else:
    _BACKENDS["compiled"] = _mc_cython

if _mc_cython is not None and os.environ.get(FORCE_FALLBACK_ENV_VAR, "0") not in ("", "0"):
    _ACTIVE = "numpy"
else:
    _ACTIVE = "compiled" if _mc_cython is not None else "numpy"


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def active_backend_name() -> str:
    return _ACTIVE


def get_backend(name: str | None = None):
    """Kernel module by name; None means the active default."""
    if name is None:
        name = _ACTIVE
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown backend {name!r}; available: {', '.join(available_backends())}"
        ) from None
