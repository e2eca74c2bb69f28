"""Numba acceleration switch.

Hot kernels in this package are written twice: a loop-style version compiled
with numba's ``@njit`` and a vectorized pure-numpy version. The environment
variable ``PAPR_ADMM_NUMBA`` selects the path: set it to ``0``, ``false`` or
``off`` before import to force the numpy fallback (useful for debugging and
for the kernel benchmark in ``benchmarks/bench_kernels.py``). If numba is not
importable the fallback is used automatically.
"""

import os

_flag = os.environ.get("PAPR_ADMM_NUMBA", "1").strip().lower()
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
