"""Numba switch.

Hot kernels are compiled with numba when it is importable and the
environment variable ``CAMOSCAT_NUMBA`` is not set to ``0``.  Every kernel
also has a pure-numpy twin; both must return identical results.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAVE_NUMBA = numba is not None
_flag = os.environ.get("CAMOSCAT_NUMBA", "1").strip().lower()
_state = {"use_numba": HAVE_NUMBA and _flag not in ("0", "false", "no", "off")}


def njit(func):
    """Compile ``func`` in nopython mode, or return it untouched."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True)(func)


def use_numba():
    return _state["use_numba"]


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"`` kernels at runtime."""
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _state["use_numba"] = name == "numba"


def backend():
    return "numba" if _state["use_numba"] else "numpy"


def configure_threads():
    """Honour ``CAMOSCAT_THREADS`` for numba's thread pool."""
    value = os.environ.get("CAMOSCAT_THREADS")
    if value and HAVE_NUMBA:
        numba.set_num_threads(max(1, min(int(value), numba.config.NUMBA_NUM_THREADS)))
