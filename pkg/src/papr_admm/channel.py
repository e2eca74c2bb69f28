"""Frequency-selective tap-delay-line channels and the spectral tone map.

A channel realization is a set of D time-domain tap matrices (K users x M
antennas) with i.i.d. CN(0, 1) entries; the per-tone frequency response is

    H[n] = sum_{d=1}^{D} taps[d] * exp(-j*2*pi*d*n/N),   n = 0..N-1.

The tone map partitions the N tones into a data set and a guard band at both
ends of the spectrum. The exact guard indices of any particular standard can
be injected via :meth:`ToneMap.from_guard_tones`; the default splits the
guard count evenly between the bottom and top of the index range.
"""

import json
import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError

logger = logging.getLogger(__name__)

# Guard fraction of the default map: 14 of 128 tones (112 data + 2 edge nulls
# would be the exact Wi-Fi 40 MHz list; only the 114/14 split matters here).
_DEFAULT_GUARDS_NUM = 14
_DEFAULT_GUARDS_DEN = 128

_CHANNEL_MAGIC = b"PACH"
_CHANNEL_VERSION = 1


@dataclass(frozen=True)
class ToneMap:
    """Partition of tone indices {0..N-1} into data tones and guard tones."""

    n_tones: int
    data_tones: np.ndarray
    guard_tones: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data_tones, dtype=np.intp)
        guard = np.asarray(self.guard_tones, dtype=np.intp)
        merged = np.concatenate([data, guard])
        if len(np.unique(merged)) != self.n_tones or merged.size != self.n_tones:
            raise ConfigError("data and guard tones must partition the tone range")
        if merged.size and (merged.min() < 0 or merged.max() >= self.n_tones):
            raise ConfigError("tone indices out of range")
        data.flags.writeable = False
        guard.flags.writeable = False
        object.__setattr__(self, "data_tones", data)
        object.__setattr__(self, "guard_tones", guard)

    @property
    def n_data(self) -> int:
        return self.data_tones.size

    @property
    def data_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_tones, dtype=bool)
        mask[self.data_tones] = True
        return mask

    @classmethod
    def from_guard_tones(cls, n_tones: int, guard_tones) -> "ToneMap":
        """Build a map from an explicit guard-index list (standard-map override)."""
        guard = np.unique(np.asarray(guard_tones, dtype=np.intp))
        mask = np.ones(n_tones, dtype=bool)
        mask[guard] = False
        return cls(n_tones, np.flatnonzero(mask), guard)


def default_tone_map(n_tones: int, n_guards: int | None = None) -> ToneMap:
    """Tone map with guard bands at both ends of the spectrum.

    For 128 tones the default yields 114 data tones and 14 guards (7 at the
    bottom, 7 at the top of the index range); for other sizes the guard count
    scales proportionally. Pass ``n_guards`` to override the count (0 gives
    an all-data map).
    """
    if n_tones < 2:
        raise ConfigError(f"need at least 2 tones, got {n_tones}")
    if n_guards is None:
        n_guards = -(-n_tones * _DEFAULT_GUARDS_NUM // _DEFAULT_GUARDS_DEN)
    if n_guards < 0 or n_guards >= n_tones:
        raise ConfigError(f"guard count {n_guards} leaves no data tones out of {n_tones}")
    top = -(-n_guards // 2)
    bottom = n_guards - top
    guards = np.concatenate([np.arange(bottom), np.arange(n_tones - top, n_tones)])
    return ToneMap.from_guard_tones(n_tones, guards)


@dataclass(frozen=True)
class ChannelSet:
    """One channel realization: tap matrices and per-tone frequency responses.

    ``taps`` has shape (D, K, M); ``freq`` has shape (N, K, M) and satisfies
    the tap/frequency consistency identity in the module docstring.
    """

    taps: np.ndarray
    freq: np.ndarray = field(repr=False)

    def __post_init__(self):
        taps = np.ascontiguousarray(self.taps, dtype=np.complex128)
        freq = np.ascontiguousarray(self.freq, dtype=np.complex128)
        if taps.ndim != 3 or freq.ndim != 3 or taps.shape[1:] != freq.shape[1:]:
            raise ShapeError(
                f"inconsistent channel shapes: taps {taps.shape}, freq {freq.shape}"
            )
        taps.flags.writeable = False
        freq.flags.writeable = False
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "freq", freq)

    @property
    def n_taps(self) -> int:
        return self.taps.shape[0]

    @property
    def n_users(self) -> int:
        return self.taps.shape[1]

    @property
    def n_antennas(self) -> int:
        return self.taps.shape[2]

    @property
    def n_tones(self) -> int:
        return self.freq.shape[0]


def freq_response(taps: np.ndarray, n_tones: int) -> np.ndarray:
    """Per-tone frequency responses (N, K, M) of tap matrices (D, K, M)."""
    d = np.arange(1, taps.shape[0] + 1)
    n = np.arange(n_tones)
    phases = np.exp(-2j * np.pi * np.outer(n, d) / n_tones)
    return np.einsum("nd,dkm->nkm", phases, taps)


def _full_row_rank(freq: np.ndarray) -> bool:
    k = freq.shape[1]
    gram = freq @ freq.conj().transpose(0, 2, 1) + 0j
    try:
        np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        return False
    return np.all(np.isfinite(gram.view(np.float64))) and k <= freq.shape[2]


def draw_channel(
    n_users: int,
    n_antennas: int,
    n_taps: int,
    n_tones: int,
    rng: np.random.Generator,
) -> ChannelSet:
    """Draw one i.i.d. CN(0,1) tap-delay-line channel realization.

    Deterministic given the generator state. Realizations with a rank
    deficient per-tone response (probability zero under the model) are
    rejected and redrawn.
    """
    if n_users > n_antennas:
        raise ConfigError(
            f"users ({n_users}) must not exceed antennas ({n_antennas}); ZF infeasible"
        )
    if n_taps < 1:
        raise ConfigError(f"need at least one tap, got {n_taps}")
    redraws = 0
    while True:
        shape = (n_taps, n_users, n_antennas)
        taps = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
        freq = freq_response(taps, n_tones)
        if _full_row_rank(freq):
            break
        redraws += 1
        logger.warning("rank-deficient channel draw rejected (%d so far)", redraws)
    return ChannelSet(taps, freq)


def save_channel(chan: ChannelSet, path) -> None:
    """Dump tap matrices to a small binary file (row-major, interleaved re/im)."""
    d, k, m = chan.taps.shape
    header = struct.pack("<4sIIIII", _CHANNEL_MAGIC, _CHANNEL_VERSION, d, k, m, chan.n_tones)
    interleaved = np.empty(chan.taps.size * 2, dtype=np.float64)
    interleaved[0::2] = chan.taps.real.ravel()
    interleaved[1::2] = chan.taps.imag.ravel()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(interleaved.tobytes())


def load_channel(path) -> ChannelSet:
    """Load a channel dumped by :func:`save_channel`; recomputes the responses."""
    with open(path, "rb") as fh:
        blob = fh.read()
    magic, version, d, k, m, n = struct.unpack_from("<4sIIIII", blob, 0)
    if magic != _CHANNEL_MAGIC or version != _CHANNEL_VERSION:
        raise ConfigError(f"not a channel dump: {path}")
    flat = np.frombuffer(blob, dtype=np.float64, offset=struct.calcsize("<4sIIIII"))
    if flat.size != 2 * d * k * m:
        raise ShapeError(f"channel dump payload truncated: {path}")
    taps = (flat[0::2] + 1j * flat[1::2]).reshape(d, k, m)
    return ChannelSet(taps, freq_response(taps, n))


def dump_tone_map(tones: ToneMap, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(
            {"n_tones": tones.n_tones, "guard_tones": tones.guard_tones.tolist()},
            fh,
            indent=0,
            sort_keys=True,
        )


def load_tone_map(path) -> ToneMap:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return ToneMap.from_guard_tones(int(doc["n_tones"]), doc["guard_tones"])
