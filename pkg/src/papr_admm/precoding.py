"""ZF precoding, tone/antenna reordering, and per-tone null-space projectors.

Zero forcing inverts the channel on every data tone,

    w[n] = H[n]^H (H[n] H[n]^H)^{-1} s[n],

so the noiseless received signal equals the user symbols exactly. The
frequency grid X collects w[n]^T as row n (tone-major layout, one column per
antenna). The projector G[n] = I - H[n]^H (H[n] H[n]^H)^{-1} H[n] maps onto
the null space of H[n]; rows projected through it are invisible to the
receivers, which is what makes the additive perturbation scheme work.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, ToneMap
from .errors import RankDeficientError, ShapeError
from .transforms import SignalGrid


@dataclass(frozen=True)
class UserSymbols:
    """Per-tone user symbol vectors: an (N, K) grid with zero guard rows."""

    symbols: np.ndarray
    tones: ToneMap
    labels: np.ndarray | None = None  # constellation labels on data tones, optional

    def __post_init__(self):
        sym = np.ascontiguousarray(self.symbols, dtype=np.complex128)
        if sym.ndim != 2 or sym.shape[0] != self.tones.n_tones:
            raise ShapeError(
                f"symbols must be (n_tones, n_users), got {sym.shape} for "
                f"{self.tones.n_tones} tones"
            )
        if self.tones.guard_tones.size and np.any(sym[self.tones.guard_tones] != 0):
            raise ValueError("guard-tone symbol rows must be exactly zero")
        sym.flags.writeable = False
        object.__setattr__(self, "symbols", sym)

    @property
    def n_users(self) -> int:
        return self.symbols.shape[1]


def _grams(h: np.ndarray) -> np.ndarray:
    return h @ h.conj().transpose(0, 2, 1)


def _solve_gram(gram: np.ndarray, rhs: np.ndarray, tones: np.ndarray) -> np.ndarray:
    # Stacked K x K solves; on failure, name the offending tone.
    try:
        return np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        for i, n in enumerate(tones):
            try:
                np.linalg.cholesky(gram[i])
            except np.linalg.LinAlgError:
                raise RankDeficientError(f"channel Gram matrix singular on tone {n}") from None
        raise


class ProjectorSet:
    """Null-space projectors for every data tone.

    The default representation is factored: applying G[n] to a row costs two
    thin products with H[n] plus a K x K solve, which is much lighter than a
    dense M x M multiply for K << M. ``mode="dense"`` materializes and applies
    the full matrices instead (more memory, same results).
    """

    def __init__(self, h_data: np.ndarray, data_tones: np.ndarray, mode: str = "factored"):
        if mode not in ("factored", "dense"):
            raise ValueError(f"unknown projector mode: {mode!r}")
        self.data_tones = np.asarray(data_tones, dtype=np.intp)
        self._h = np.ascontiguousarray(h_data, dtype=np.complex128)
        self._gram = _grams(self._h)
        self.mode = mode
        self._dense = self._materialize() if mode == "dense" else None
        self._tone_pos = {int(n): i for i, n in enumerate(self.data_tones)}

    @property
    def n_antennas(self) -> int:
        return self._h.shape[2]

    def _materialize(self) -> np.ndarray:
        m = self._h.shape[2]
        t = _solve_gram(self._gram, self._h, self.data_tones)
        return np.eye(m)[None, :, :] - self._h.conj().transpose(0, 2, 1) @ t

    def matrix(self, tone: int) -> np.ndarray:
        """Dense M x M projector for one data tone."""
        if int(tone) not in self._tone_pos:
            raise KeyError(f"tone {tone} is not a data tone")
        i = self._tone_pos[int(tone)]
        if self._dense is not None:
            return self._dense[i]
        return self._materialize_one(i)

    def _materialize_one(self, i: int) -> np.ndarray:
        m = self._h.shape[2]
        h = self._h[i]
        t = np.linalg.solve(self._gram[i], h)
        return np.eye(m) - h.conj().T @ t

    def project_rows(self, rows: np.ndarray) -> np.ndarray:
        """Apply row -> row @ G[n]^T for all data tones at once.

        ``rows`` has one row per data tone, in ``data_tones`` order.
        """
        if rows.shape != (self.data_tones.size, self._h.shape[2]):
            raise ShapeError(
                f"expected rows of shape {(self.data_tones.size, self._h.shape[2])}, "
                f"got {rows.shape}"
            )
        if self._dense is not None:
            return (self._dense @ rows[:, :, None])[:, :, 0]
        v = rows[:, :, None]
        u = self._h @ v
        w = _solve_gram(self._gram, u, self.data_tones)
        return (v - self._h.conj().transpose(0, 2, 1) @ w)[:, :, 0]


def zf_precode(channels: ChannelSet, symbols: UserSymbols) -> SignalGrid:
    """ZF-precode user symbols into the (N, M) frequency grid.

    Guard-tone rows come out exactly zero because their symbol vectors are
    zero by construction.
    """
    tones = symbols.tones
    n, m = channels.n_tones, channels.n_antennas
    if symbols.symbols.shape != (n, channels.n_users):
        raise ShapeError(
            f"symbols {symbols.symbols.shape} do not match channel "
            f"({n} tones, {channels.n_users} users)"
        )
    x = np.zeros((n, m), dtype=np.complex128)
    data = tones.data_tones
    h = channels.freq[data]
    coeff = _solve_gram(_grams(h), symbols.symbols[data][:, :, None], data)
    x[data] = (h.conj().transpose(0, 2, 1) @ coeff)[:, :, 0]
    return SignalGrid(x)


def build_projectors(
    channels: ChannelSet, tones: ToneMap, mode: str = "factored"
) -> ProjectorSet:
    """Null-space projectors for every data tone of a channel realization."""
    ps = ProjectorSet(channels.freq[tones.data_tones], tones.data_tones, mode=mode)
    return ps


def mui_residual(channels: ChannelSet, grid: SignalGrid, symbols: UserSymbols) -> float:
    """Worst-tone deviation of the noiseless received signal from the symbols.

    Returns max over data tones of ||H[n] x_row[n]^T - s[n]||_2; zero means
    the grid causes no multi-user interference.
    """
    data = symbols.tones.data_tones
    if grid.data.shape[0] != channels.n_tones:
        raise ShapeError(
            f"grid has {grid.data.shape[0]} tones, channel has {channels.n_tones}"
        )
    received = (channels.freq[data] @ grid.data[data][:, :, None])[:, :, 0]
    dev = np.linalg.norm(received - symbols.symbols[data], axis=1)
    return float(dev.max()) if dev.size else 0.0
