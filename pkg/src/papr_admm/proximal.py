"""Proximal operator of the (complex) infinity norm.

``proxinf(q, lam)`` solves  argmin_y  lam*||y||_inf + ||y - q||_2^2.  The
minimizer clips the moduli of q at a level A while preserving phases: by the
Moreau decomposition the prox equals q minus the projection of q onto the
l1 ball of radius lam/2, so A is the water-filling level with

    sum_k max(|q_k| - A, 0) = lam/2,

or 0 (with y = 0) when the total modulus mass is at most lam/2. The level is
found exactly by sorting the moduli and solving the unique linear breakpoint
equation; no iterative tolerance is involved.

Two implementations of the per-column water-filling are provided: a numba
kernel and a vectorized numpy path (see :mod:`papr_admm._accel`).
"""

from dataclasses import dataclass

import numpy as np

from ._accel import NUMBA_ENABLED, njit
from .transforms import TimeGrid


@njit(cache=True)
def _clip_levels_kernel(moduli: np.ndarray, half: np.ndarray) -> np.ndarray:
    """Water-filling clip level per column; ``half`` holds lam/2 per column.

    Only the largest rho moduli enter the breakpoint equation and the
    breakpoint indices form a prefix of the descending order, so a top-k
    selection with doubling k replaces the full sort: if the scan stops
    before exhausting the current top-k, the level is certified.
    """
    n, m = moduli.shape
    levels = np.empty(m)
    for j in range(m):
        h = half[j]
        if h <= 0.0:
            lev = 0.0
            for i in range(n):
                if moduli[i, j] > lev:
                    lev = moduli[i, j]
            levels[j] = lev
            continue
        col = np.empty(n)
        total = 0.0
        for i in range(n):
            col[i] = moduli[i, j]
            total += col[i]
        if total <= h:
            levels[j] = 0.0
            continue
        k = 32 if n > 32 else n
        while True:
            if k < n:
                top = np.sort(-np.partition(-col, k - 1)[:k])[::-1]
            else:
                top = np.sort(col)[::-1]
            cum = 0.0
            rho = 0
            cum_rho = 0.0
            for i in range(top.shape[0]):
                cum += top[i]
                if top[i] > (cum - h) / (i + 1):
                    rho = i + 1
                    cum_rho = cum
            if rho < k or k == n:
                levels[j] = (cum_rho - h) / rho
                break
            k = 2 * k if 2 * k < n else n
    return levels


def _clip_levels_numpy(moduli: np.ndarray, half: np.ndarray) -> np.ndarray:
    n, m = moduli.shape
    levels = np.empty(m)
    srt = np.sort(moduli, axis=0)[::-1]
    active = half > 0.0
    if np.any(active):
        sub = srt[:, active]
        cums = np.cumsum(sub, axis=0)
        h = half[active]
        counts = np.arange(1, n + 1)[:, None]
        # The set of indices satisfying the breakpoint condition is a prefix,
        # so its size is the water-filling support rho.
        rho = np.maximum((sub > (cums - h) / counts).sum(axis=0), 1)
        lev = (cums[rho - 1, np.arange(rho.size)] - h) / rho
        lev[cums[-1] <= h] = 0.0
        levels[active] = lev
    levels[~active] = srt[0, ~active]
    return levels


def clip_levels(moduli: np.ndarray, half: np.ndarray) -> np.ndarray:
    """Per-column clip levels for an (n, m) modulus array (accel-selected path)."""
    if NUMBA_ENABLED:
        return _clip_levels_kernel(np.ascontiguousarray(moduli), half)
    return _clip_levels_numpy(moduli, half)


def _clamp_moduli(q: np.ndarray, levels: np.ndarray) -> np.ndarray:
    moduli = np.abs(q)
    scale = np.ones_like(moduli)
    np.divide(levels, moduli, out=scale, where=moduli > levels)
    return q * scale


@dataclass(frozen=True)
class ProxResult:
    """Clipped signal plus the water-filling clip level A."""

    y: np.ndarray
    clip_level: float


def proxinf(q: np.ndarray, lam: float) -> ProxResult:
    """Proximal operator of lam*||.||_inf on one complex (or real) vector.

    Entries with modulus at most the returned clip level are unchanged;
    larger entries keep their phase and are clamped to the level. ``lam=0``
    is the identity.

    Raises:
        ValueError: if ``lam`` is negative.
    """
    if lam < 0:
        raise ValueError(f"regularization weight must be nonnegative, got {lam}")
    q = np.asarray(q, dtype=np.complex128).ravel()
    levels = clip_levels(np.abs(q)[:, None], np.array([lam / 2.0]))
    level = float(levels[0])
    return ProxResult(_clamp_moduli(q, np.array([level])), level)


def proxinf_grid(
    q: TimeGrid, lam: float, weights: np.ndarray | None = None
) -> TimeGrid:
    """Column-wise prox on a time grid; ``weights`` scale lam per antenna."""
    if lam < 0:
        raise ValueError(f"regularization weight must be nonnegative, got {lam}")
    m = q.data.shape[1]
    w = np.ones(m) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != (m,):
        raise ValueError(f"weights must have shape ({m},), got {w.shape}")
    if np.any(w < 0):
        raise ValueError("per-antenna weights must be nonnegative")
    levels = clip_levels(np.abs(q.data), lam * w / 2.0)
    return TimeGrid(_clamp_moduli(q.data, levels), oversample=q.oversample)
