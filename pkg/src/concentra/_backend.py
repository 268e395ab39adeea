"""Kernel backend selection.

The compiled extension is preferred; ``CONCENTRA_BACKEND=python`` forces the
pure-Python fallback. ``CONCENTRA_THREADS`` caps kernel parallelism.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _fallback


def _select() -> ModuleType:
    if os.environ.get("CONCENTRA_BACKEND", "").lower() == "python":
        return _fallback
    try:
        from . import _kernels
    except ImportError:
        return _fallback
    return _kernels


kernels: ModuleType = _select()
BACKEND: str = kernels.NAME


def threads() -> int:
    try:
        return max(1, int(os.environ.get("CONCENTRA_THREADS", "1")))
    except ValueError:
        return 1


def use(name: str) -> None:
    """Switch backend at runtime (``"python"`` or ``"cython"``)."""
    global kernels, BACKEND
    if name == "python":
        kernels = _fallback
    elif name == "cython":
        from . import _kernels

        kernels = _kernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = kernels.NAME
