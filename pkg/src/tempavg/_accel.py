"""Optional numba acceleration for hot kernels.

Kernels are written as plain numpy loops and decorated with
:func:`maybe_njit`.  When numba is importable (the default) they are
compiled in nopython mode; setting the environment variable
``TEMPAVG_NO_NUMBA=1`` keeps the pure-Python versions.  Both paths
consume random streams identically, so seeded results are bit-for-bit
reproducible across modes.
"""

from __future__ import annotations

import os


def _flag_disabled() -> bool:
    return os.environ.get("TEMPAVG_NO_NUMBA", "") not in ("", "0")


NUMBA_ENABLED = False
if not _flag_disabled():
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def maybe_njit(*args, **kwargs):
    """``numba.njit`` when acceleration is on, identity decorator otherwise."""
    if NUMBA_ENABLED:
        import numba

        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(func):
        return func

    return wrap


def plain(func):
    """Return the uncompiled version of a ``maybe_njit``-decorated function."""
    return getattr(func, "py_func", func)


def using_numba() -> bool:
    return NUMBA_ENABLED
