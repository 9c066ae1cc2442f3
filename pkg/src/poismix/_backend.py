"""Kernel backend selection.

The hot loops live in two interchangeable modules: ``_kernels_numba`` (scalar
loops compiled with ``numba.njit``) and ``_kernels_numpy`` (vectorised numpy).
``POISMIX_BACKEND=numpy`` forces the fallback; the default is numba whenever
it imports.
"""
from __future__ import annotations

import importlib
import os
from types import ModuleType

ENV_VAR = "POISMIX_BACKEND"
_VALID = ("numba", "numpy")

_active: ModuleType | None = None


def _load(name: str) -> ModuleType:
    if name not in _VALID:
        raise ValueError(f"unknown backend {name!r}; expected one of {_VALID}")
    return importlib.import_module(f"poismix._kernels_{name}")


def _default() -> str:
    requested = os.environ.get(ENV_VAR, "").strip().lower()
    if requested:
        return requested
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


def kernels() -> ModuleType:
    """Return the active kernel module, importing it on first use."""
    global _active
    if _active is None:
        _active = _load(_default())
    return _active


def set_backend(name: str) -> None:
    global _active
    _active = _load(name)


def backend_name() -> str:
    return kernels().NAME
