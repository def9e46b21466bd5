"""Kernel backend selection.

``HYPERPROP_BACKEND=numpy`` (or an unavailable numba) selects the pure
numpy/Python kernels; the default is the numba-compiled set.  Both expose the
same functions with the same results, so callers go through ``kernels()``.
"""
from __future__ import annotations

import importlib
import os
import warnings
from contextlib import contextmanager
from types import ModuleType

BACKEND_ENV = "HYPERPROP_BACKEND"
BACKENDS = ("numba", "numpy")

_active: ModuleType | None = None
_active_name: str | None = None


def load(name: str) -> ModuleType:
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    return importlib.import_module(f"{__name__}.{name}_kernels")


def set_backend(name: str) -> None:
    global _active, _active_name
    _active = load(name)
    _active_name = name


def _default() -> str:
    want = os.environ.get(BACKEND_ENV, "numba").strip().lower() or "numba"
    if want == "numba":
        try:
            import numba  # noqa: F401
        except ImportError:
            warnings.warn("numba is not installed; falling back to the numpy kernels")
            return "numpy"
    return want


def kernels() -> ModuleType:
    if _active is None:
        set_backend(_default())
    return _active


def backend_name() -> str:
    kernels()
    return _active_name


@contextmanager
def using(name: str):
    """Temporarily switch backend (tests and benchmarks)."""
    prev_mod, prev_name = _active, _active_name
    set_backend(name)
    try:
        yield _active
    finally:
        globals().update(_active=prev_mod, _active_name=prev_name)
