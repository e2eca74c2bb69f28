"""Complex signal grids, oversampled frequency/time transforms and the PAPR metric.

The synthesis operator maps an N-tone frequency grid to L-times oversampled
time samples,

    y[k] = (1/sqrt(N)) * sum_n x[n] * exp(j*2*pi*n*k/(L*N)),   0 <= k < L*N,

applied column-wise (one column per transmit antenna). Its columns are
orthogonal with squared norm L, so ||synthesize(x)||_F^2 = L*||x||_F^2.
The analysis operator here is the unique left inverse on the synthesis
range, i.e. (1/L) times the adjoint; for L=1 both reduce to the standard
unitary DFT pair. Tone index 0 maps to DFT bin 0 (no fftshift anywhere in
the core; spectral placement is the tone map's job).
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ShapeError


def _as_complex_grid(data: np.ndarray, what: str) -> np.ndarray:
    arr = np.ascontiguousarray(data, dtype=np.complex128)
    if arr.ndim != 2:
        raise ShapeError(f"{what} must be a 2-D complex matrix, got ndim={arr.ndim}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ShapeError(f"{what} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError(f"{what} contains non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class SignalGrid:
    """Frequency-domain grid: rows are the N tones, columns the M antennas."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _as_complex_grid(self.data, "SignalGrid"))

    @property
    def n_tones(self) -> int:
        return self.data.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class TimeGrid:
    """Time-domain grid: rows are the L*N oversampled samples per antenna column."""

    data: np.ndarray
    oversample: int = 1

    def __post_init__(self):
        object.__setattr__(self, "data", _as_complex_grid(self.data, "TimeGrid"))
        if self.oversample < 1:
            raise ShapeError(f"oversample must be >= 1, got {self.oversample}")
        if self.data.shape[0] % self.oversample != 0:
            raise ShapeError(
                f"TimeGrid with {self.data.shape[0]} rows is not divisible by "
                f"oversample={self.oversample}"
            )

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.data.shape[1]

    @property
    def n_tones(self) -> int:
        return self.data.shape[0] // self.oversample


def oversampled_idft(x: np.ndarray, oversample: int) -> np.ndarray:
    """Column-wise oversampled synthesis of an (N, M) array to (L*N, M).

    Computed as a zero-padded length-L*N inverse FFT scaled so that the
    result equals the direct evaluation of the synthesis sum exactly.
    """
    if oversample < 1:
        raise ShapeError(f"oversample must be >= 1, got {oversample}")
    n = x.shape[0]
    ln = oversample * n
    return np.fft.ifft(x, n=ln, axis=0) * (ln / np.sqrt(n))


def oversampled_dft(y: np.ndarray, oversample: int) -> np.ndarray:
    """Left inverse of :func:`oversampled_idft`: (L*N, M) array back to (N, M)."""
    ln = y.shape[0]
    if oversample < 1 or ln % oversample != 0:
        raise ShapeError(f"{ln} rows not divisible by oversample={oversample}")
    n = ln // oversample
    return np.fft.fft(y, axis=0)[:n] / (oversample * np.sqrt(n))


def synthesize(x: SignalGrid, oversample: int) -> TimeGrid:
    """Transform a frequency grid to its L-times oversampled time-domain signal."""
    return TimeGrid(oversampled_idft(x.data, oversample), oversample=oversample)


def analyze(y: TimeGrid) -> SignalGrid:
    """Recover the frequency grid from an oversampled time grid.

    Exact round trip: ``analyze(synthesize(x, L)) == x`` to machine precision
    for every L >= 1.
    """
    return SignalGrid(oversampled_dft(y.data, y.oversample))


class PaprValue(NamedTuple):
    linear: float
    db: float


def papr(y: np.ndarray) -> PaprValue:
    """Peak-to-average power ratio of one time-domain sample vector.

    Returns ``LN * ||y||_inf^2 / ||y||_2^2`` (peak power over mean power),
    which always lies in [1, LN], together with its decibel form.

    Raises:
        ValueError: if ``y`` is identically zero (PAPR undefined).
    """
    y = np.asarray(y).ravel()
    power = np.abs(y) ** 2
    total = power.sum()
    if total == 0.0:
        raise ValueError("PAPR undefined for an all-zero signal")
    ratio = float(power.max() * power.size / total)
    return PaprValue(ratio, 10.0 * np.log10(ratio))


def papr_per_antenna(y: TimeGrid) -> np.ndarray:
    """PAPR in dB of each antenna column of a time grid."""
    power = np.abs(y.data) ** 2
    totals = power.sum(axis=0)
    if np.any(totals == 0.0):
        raise ValueError("PAPR undefined for an all-zero antenna column")
    ratios = power.max(axis=0) * power.shape[0] / totals
    return 10.0 * np.log10(ratios)
