"""Timing comparison of the compiled kernels against their numpy fallbacks.

The package ships two implementations of each hot kernel: a loop-style
version compiled with numba and a vectorized pure-numpy version (selected at
import time via the PAPR_ADMM_NUMBA environment variable). This script times
both in one process by calling the implementations directly.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from papr_admm.commsim import (
    _BRANCH_OUT,
    _PREV_STATE,
    _viterbi_kernel,
    _viterbi_numpy,
    conv_encode,
)
from papr_admm.proximal import _clip_levels_kernel, _clip_levels_numpy


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_clip_levels():
    rng = np.random.default_rng(0)
    print("clip-level water filling (per-antenna prox budgets)")
    print(f"  {'shape':>14s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for n, m in ((512, 128), (4096, 128), (16384, 256)):
        moduli = np.abs(rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m)))
        half = np.full(m, 0.5)
        _clip_levels_kernel(moduli, half)  # compile before timing
        fast = timeit(lambda: _clip_levels_kernel(moduli, half))
        slow = timeit(lambda: _clip_levels_numpy(moduli, half))
        np.testing.assert_allclose(
            _clip_levels_kernel(moduli, half), _clip_levels_numpy(moduli, half), atol=1e-12
        )
        print(f"  {f'{n}x{m}':>14s} {fast * 1e3:9.2f}ms {slow * 1e3:9.2f}ms {slow / fast:7.1f}x")


def bench_viterbi():
    rng = np.random.default_rng(1)
    print("Viterbi decoding (rate-1/2 code, squared-error metric)")
    print(f"  {'frame bits':>14s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for n_info in (340, 2048, 16384):
        info = rng.integers(0, 2, n_info)
        coded = conv_encode(np.concatenate([info, np.zeros(2, dtype=np.int64)]))
        r = coded + 0.3 * rng.standard_normal(coded.size)
        _viterbi_kernel(r, _PREV_STATE, _BRANCH_OUT, True)  # compile before timing
        fast = timeit(lambda: _viterbi_kernel(r, _PREV_STATE, _BRANCH_OUT, True))
        slow = timeit(lambda: _viterbi_numpy(r, _PREV_STATE, _BRANCH_OUT, True))
        np.testing.assert_array_equal(
            _viterbi_kernel(r, _PREV_STATE, _BRANCH_OUT, True),
            _viterbi_numpy(r, _PREV_STATE, _BRANCH_OUT, True),
        )
        print(
            f"  {n_info:>14d} {fast * 1e3:9.2f}ms {slow * 1e3:9.2f}ms {slow / fast:7.1f}x"
        )


if __name__ == "__main__":
    bench_clip_levels()
    bench_viterbi()
