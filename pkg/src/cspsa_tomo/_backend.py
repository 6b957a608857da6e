"""Selects the kernel backend at import time.

The compiled extension is preferred when it imported cleanly; the numpy
fallback is always available.  Set CSPSA_TOMO_BACKEND=python or
=compiled to force a choice (forcing "compiled" fails loudly when the
extension is missing instead of silently falling back).

Callers access the kernels as ``_backend.kernels.<fn>`` rather than
binding the functions at import, so ``set_backend`` swaps take effect
everywhere.
"""

from __future__ import annotations

import os

from . import _kernels_py

_ENV_VAR = "CSPSA_TOMO_BACKEND"


def _load():
    forced = os.environ.get(_ENV_VAR, "")
    if forced == "python":
        return _kernels_py, "python"
    if forced == "compiled":
        from . import _kernels

        return _kernels, "compiled"
    if forced:
        raise ImportError(
            f"{_ENV_VAR}={forced!r} not recognized; use 'python' or 'compiled'"
        )
    try:
        from . import _kernels

        return _kernels, "compiled"
    except ImportError:
        return _kernels_py, "python"


kernels, _backend_name = _load()


def active_backend() -> str:
    """Name of the backend in use, 'compiled' or 'python'."""
    return _backend_name


def set_backend(name: str) -> None:
    """Force a backend by name; used by benchmarks and tests."""
    global kernels, _backend_name
    if name == "python":
        kernels = _kernels_py
    elif name == "compiled":
        from . import _kernels

        kernels = _kernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    _backend_name = name
