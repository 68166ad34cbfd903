"""Backend selection for the hot kernels.

Every kernel ships twice: a numba ``@njit`` loop and a vectorised numpy
version.  The numba path is the default whenever numba imports; setting
``SHELLDECAY_DISABLE_NUMBA=1`` (or ``true``/``yes``/``on``) selects numpy.
"""

from __future__ import annotations

import contextlib
import os

ENV_FLAG = "SHELLDECAY_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None


def _env_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


_backend = "numba" if HAVE_NUMBA and not _env_disabled() else "numpy"


def njit(fn):
    """Compile ``fn`` lazily with numba, or return it untouched without numba."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend() -> str:
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return _backend


def use_numba() -> bool:
    return _backend == "numba"


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch kernels to ``name`` (used by tests and benchmarks)."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    previous = _backend
    _backend = name
    try:
        yield
    finally:
        _backend = previous
