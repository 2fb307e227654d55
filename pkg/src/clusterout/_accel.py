"""Numba switch.

Set ``CLUSTEROUT_DISABLE_NUMBA=1`` to force the pure-numpy kernels. When numba
is missing the numpy path is used silently.
"""
import os

DISABLE_ENV = "CLUSTEROUT_DISABLE_NUMBA"

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    HAVE_NUMBA = False


def numba_requested():
    return os.environ.get(DISABLE_ENV, "").strip().lower() not in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and numba_requested()


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator.

    The decorated function is always compiled lazily, so importing the kernel
    module costs nothing when the numpy path is selected.
    """
    kwargs.setdefault("cache", True)
    if _njit is None:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return _njit(*args, **kwargs)
