"""Select the Jacobi kernel: compiled Cython core when importable, numpy otherwise.

``ASGO_BACKEND=python`` forces the fallback; ``use_backend`` switches at runtime
(benchmarks and the backend-parity tests use it).
"""
import contextlib
import os

from asgo import _jacobi_py

try:
    from asgo import _jacobi_ext
except ImportError:  # not built
    _jacobi_ext = None

_KERNELS = {"python": _jacobi_py.jacobi_eigh}
if _jacobi_ext is not None:
    _KERNELS["cython"] = _jacobi_ext.jacobi_eigh


def available():
    return sorted(_KERNELS)


def _default():
    forced = os.environ.get("ASGO_BACKEND", "").strip().lower()
    if forced:
        if forced not in _KERNELS:
            raise ImportError(f"ASGO_BACKEND={forced!r} is not available; have {available()}")
        return forced
    return "cython" if "cython" in _KERNELS else "python"


_active = _default()


def name():
    return _active


def jacobi_eigh(x, tol, max_sweeps):
    return _KERNELS[_active](x, tol, max_sweeps)


def set_backend(backend):
    global _active
    if backend not in _KERNELS:
        raise ValueError(f"unknown backend {backend!r}; have {available()}")
    _active = backend


@contextlib.contextmanager
def use_backend(backend):
    previous = _active
    set_backend(backend)
    try:
        yield
    finally:
        set_backend(previous)
