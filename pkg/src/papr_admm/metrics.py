"""Peak statistics and signal-quality measurements.

CCDF curves pool per-antenna PAPR samples across antennas and trials. Power
increase compares a processed frequency grid against the plain precoder
output. The guard-band fraction quantifies out-of-band leakage of a
frequency grid; it is exactly zero for schemes that keep guard rows zero.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel import ToneMap
from .errors import ConfigError, ShapeError
from .transforms import SignalGrid

DEFAULT_THRESHOLDS_DB = np.round(np.arange(0, 281) * 0.05, 2)


@dataclass(frozen=True)
class CcdfCurve:
    """Empirical exceedance curve Pr(PAPR > threshold)."""

    thresholds_db: np.ndarray
    probabilities: np.ndarray
    sample_count: int

    def __post_init__(self):
        t = np.asarray(self.thresholds_db, dtype=np.float64)
        p = np.asarray(self.probabilities, dtype=np.float64)
        if t.ndim != 1 or t.shape != p.shape:
            raise ShapeError("thresholds and probabilities must be matching 1-d arrays")
        if np.any(p < 0) or np.any(p > 1):
            raise ConfigError("probabilities must lie in [0, 1]")
        if np.any(np.diff(p) > 0):
            raise ConfigError("exceedance probabilities must be non-increasing")
        object.__setattr__(self, "thresholds_db", t)
        object.__setattr__(self, "probabilities", p)


def ccdf(samples_db, thresholds_db=None) -> CcdfCurve:
    """Exceedance probability of pooled PAPR samples at each threshold."""
    samples = np.asarray(samples_db, dtype=np.float64).ravel()
    if samples.size == 0:
        raise ConfigError("cannot build a CCDF from zero samples")
    if thresholds_db is None:
        thresholds_db = DEFAULT_THRESHOLDS_DB
    thr = np.asarray(thresholds_db, dtype=np.float64)
    if np.any(np.diff(thr) <= 0):
        raise ConfigError("thresholds must be strictly increasing")
    srt = np.sort(samples)
    exceed = samples.size - np.searchsorted(srt, thr, side="right")
    return CcdfCurve(thr, exceed / samples.size, int(samples.size))


def papr_at_ccdf(curve: CcdfCurve, prob: float) -> float:
    """Smallest threshold where the curve drops to ``prob`` or below, with
    linear interpolation between the bracketing grid points."""
    if not 0 < prob < 1:
        raise ConfigError(f"probability must be in (0, 1), got {prob}")
    below = curve.probabilities <= prob
    if not below.any():
        raise ConfigError(f"curve never reaches probability {prob}; extend the threshold grid")
    i = int(np.argmax(below))
    if i == 0:
        return float(curve.thresholds_db[0])
    p_hi, p_lo = curve.probabilities[i - 1], curve.probabilities[i]
    t_lo, t_hi = curve.thresholds_db[i - 1], curve.thresholds_db[i]
    if p_hi == p_lo:
        return float(t_hi)
    frac = (p_hi - prob) / (p_hi - p_lo)
    return float(t_lo + frac * (t_hi - t_lo))


def power_increase(xhat: SignalGrid, x_ref: SignalGrid) -> float:
    """10*log10 of the grid power ratio relative to the reference."""
    if xhat.data.shape != x_ref.data.shape:
        raise ShapeError(f"grid shapes differ: {xhat.data.shape} vs {x_ref.data.shape}")
    ref = np.linalg.norm(x_ref.data) ** 2
    if ref == 0:
        raise ConfigError("reference grid has zero power")
    return float(10.0 * np.log10(np.linalg.norm(xhat.data) ** 2 / ref))


def guard_band_power(xhat: SignalGrid, tones: ToneMap) -> float:
    """Fraction of the grid's power sitting on guard tones, in [0, 1]."""
    if tones.n_tones != xhat.n_tones:
        raise ShapeError(f"tone map covers {tones.n_tones} tones, grid has {xhat.n_tones}")
    total = float(np.sum(np.abs(xhat.data) ** 2))
    if total == 0:
        return 0.0
    guard = float(np.sum(np.abs(xhat.data[tones.guard_tones]) ** 2))
    return guard / total


@dataclass(frozen=True)
class TrialRecord:
    """Per-trial, per-scheme diagnostics feeding the trial CSV."""

    trial: int
    scheme: str
    papr_db: np.ndarray  # one entry per antenna
    pi_db: float
    mui_residual: float
    guard_fraction: float
    iterations: int
    seed: int

    def __post_init__(self):
        papr = np.asarray(self.papr_db, dtype=np.float64)
        if papr.ndim != 1 or papr.size == 0:
            raise ShapeError("papr_db must be a nonempty 1-d array")
        object.__setattr__(self, "papr_db", papr)
        scalars = (self.pi_db, self.mui_residual, self.guard_fraction)
        if not (np.all(np.isfinite(papr)) and all(np.isfinite(v) for v in scalars)):
            raise ConfigError("trial record fields must be finite")


TRIAL_CSV_HEADER = "trial,scheme,antenna,papr_db,pi_db,mui_residual,guard_fraction,iterations,seed"


def trial_csv_rows(record: TrialRecord) -> list[str]:
    """One CSV row per antenna; trial-level fields repeat on each row."""
    common = (
        f"{record.pi_db!r},{record.mui_residual!r},{record.guard_fraction!r},"
        f"{record.iterations},{record.seed}"
    )
    return [
        f"{record.trial},{record.scheme},{m},{float(v)!r},{common}"
        for m, v in enumerate(record.papr_db)
    ]
