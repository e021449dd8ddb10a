"""Kernel backend selection.

Hot numeric kernels (the SDP solver core and the Monte Carlo violation
counters) are compiled with numba when it is installed.  Setting the
environment variable ``QSTEER_NUMBA=0`` (or ``off``/``false``) forces the
pure-numpy path; the same code runs uncompiled, so results agree up to
floating-point noise.  ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

_DISABLE_VALUES = {"0", "off", "false", "no"}


def _numba_enabled() -> bool:
    flag = os.environ.get("QSTEER_NUMBA", "auto").strip().lower()
    if flag in _DISABLE_VALUES:
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_enabled()
BACKEND = "numba" if NUMBA_ENABLED else "numpy"


def maybe_njit(*args, **kwargs):
    """``numba.njit`` when the numba backend is active, identity otherwise.

    Usable both bare (``@maybe_njit``) and with options
    (``@maybe_njit(cache=True)``).
    """
    if NUMBA_ENABLED:
        from numba import njit

        return njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]

    def decorator(func):
        return func

    return decorator
