"""Backend selection for the compiled kernels.

Every hot kernel exists twice: a loop-style implementation compiled with
numba, and a vectorised numpy implementation. Set
``RICCATI_TONTINE_DISABLE_NUMBA=1`` to force the numpy path (also used
automatically when numba is not importable).
"""
import os

_FLAG = "RICCATI_TONTINE_DISABLE_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes")


def njit(*args, **kwargs):
    """``numba.njit`` with caching on, or an identity decorator without numba."""
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def pick(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl
