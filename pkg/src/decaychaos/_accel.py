"""Numba switch.

Set ``DECAYCHAOS_DISABLE_NUMBA=1`` (or ``NUMBA_DISABLE_JIT=1``) to run every
kernel through its pure-numpy twin. Both paths return identical results; the
tests run against whichever one is active.
"""
import os

_FALSEY = ("", "0", "false", "no", "off")


def _flag(name):
    return os.environ.get(name, "").strip().lower() not in _FALSEY


try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not (
    _flag("DECAYCHAOS_DISABLE_NUMBA") or _flag("NUMBA_DISABLE_JIT"))


def njit(*args, **kwargs):
    """``numba.njit`` with nogil/cache defaults; identity when numba is absent."""
    kwargs.setdefault("nogil", True)
    kwargs.setdefault("cache", True)

    def wrap(fn):
        if not HAS_NUMBA:
            return fn
        return numba.njit(**kwargs)(fn)

    if len(args) == 1 and callable(args[0]):
        return wrap(args[0])
    return wrap


def backend():
    return "numba" if USE_NUMBA else "numpy"
