"""JIT shim: numba acceleration with a pure-numpy fallback.

Set CHOMET_NUMBA=0 (or "false"/"off") to run every kernel as plain Python,
e.g. for debugging or on platforms where numba is unavailable. The
uncompiled functions are numerically identical; the flag only selects
whether numba compiles them.
"""

import os

_flag = os.environ.get("CHOMET_NUMBA", "1").strip().lower()
NUMBA_ENABLED = _flag not in ("0", "false", "off", "no")

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper
