"""Coded downlink simulation for BER-vs-SNR curves.

Per user and OFDM frame: information bits are convolutionally encoded
(rate 1/2, generators 5/7 octal, two flush bits), interleaved by a seeded
random permutation, Gray-mapped onto 64-QAM data tones, precoded, transformed
by the scheme under test, passed through the per-tone channel with AWGN,
hard-demapped, deinterleaved and Viterbi-decoded.

SNR is defined as (mean squared row norm of the transmitted frequency grid)
divided by the per-entry noise variance N0, so any transmit-power increase a
scheme causes shows up as a corresponding SNR penalty.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import streams
from ._accel import NUMBA_ENABLED, njit
from .admm import AdmmParams
from .baselines import ClipConfig
from .channel import ToneMap, default_tone_map, draw_channel
from .errors import ConfigError, FrameError
from .precoding import UserSymbols, build_projectors, zf_precode
from .schemes import PROXINF_ADMM, SchemeSpec, apply_scheme, parse_scheme

QAM_SCALE = 1.0 / np.sqrt(42.0)  # unit mean symbol energy over the 64-point grid

# Per-axis Gray labels. _GRAY_LEVELS[b] is the amplitude of the 3-bit label b;
# _RANK_TO_LABEL inverts it along the sorted amplitudes -7..+7.
_GRAY_LEVELS = np.array([-7.0, -5.0, -1.0, -3.0, 7.0, 5.0, 1.0, 3.0])
_RANK_TO_LABEL = np.array([0, 1, 3, 2, 6, 7, 5, 4], dtype=np.int64)
_SORTED_LEVELS = np.arange(-7.0, 8.0, 2.0)
_LABEL_BITS = ((_RANK_TO_LABEL[:, None] >> np.array([2, 1, 0])) & 1).astype(np.int64)


@dataclass(frozen=True)
class CodeConfig:
    """Rate-1/2 convolutional code, constraint length 3, zero-flushed."""

    generators: tuple[int, int] = (5, 7)
    flush_bits: int = 2

    def __post_init__(self):
        if tuple(self.generators) != (5, 7):
            raise ConfigError(f"only the (5, 7) octal generator pair is supported")
        if self.flush_bits != 2:
            raise ConfigError("termination uses exactly 2 flush bits")


@dataclass(frozen=True)
class LinkConfig:
    """Per-link modem options; the constellation and code are fixed."""

    code: CodeConfig = CodeConfig()
    soft_metric: bool = False  # feed distance-based soft bits to the decoder


def conv_encode(bits) -> np.ndarray:
    """Encode with generators 5/7 octal from the zero state.

    Output interleaves the two generator outputs per input bit; length is
    exactly 2 * len(bits). Termination is the framing layer's business:
    append the flush zeros to the input to terminate (see
    :func:`encode_frame`).
    """
    u = np.asarray(bits, dtype=np.int64)
    if u.ndim != 1:
        raise FrameError(f"bits must be 1-d, got shape {u.shape}")
    if u.size and not np.isin(u, (0, 1)).all():
        raise FrameError("bits must be 0/1 valued")
    s1 = np.zeros_like(u)
    s1[1:] = u[:-1]
    s2 = np.zeros_like(u)
    s2[2:] = u[:-2]
    out1 = u ^ s2
    out2 = u ^ s1 ^ s2
    return np.stack([out1, out2], axis=1).ravel()


def _build_trellis():
    # state s = (newest register << 1) | oldest; predecessor tables for the
    # add-compare-select recursion, indexed by (next_state, branch).
    prev_state = np.empty((4, 2), dtype=np.int64)
    out = np.empty((4, 2, 2), dtype=np.float64)
    for ns in range(4):
        u = ns >> 1
        for j in range(2):
            s = ((ns & 1) << 1) | j
            prev_state[ns, j] = s
            out[ns, j, 0] = u ^ (s & 1)
            out[ns, j, 1] = u ^ (s >> 1) ^ (s & 1)
    return prev_state, out


_PREV_STATE, _BRANCH_OUT = _build_trellis()


@njit(cache=True)
def _viterbi_kernel(r, prev_state, branch_out, terminated):
    n_steps = r.shape[0] // 2
    pm = np.full(4, 1e300)
    pm[0] = 0.0
    back = np.zeros((n_steps, 4), dtype=np.int64)
    for t in range(n_steps):
        r0 = r[2 * t]
        r1 = r[2 * t + 1]
        new = np.full(4, 1e300)
        for ns in range(4):
            for j in range(2):
                ps = prev_state[ns, j]
                d0 = r0 - branch_out[ns, j, 0]
                d1 = r1 - branch_out[ns, j, 1]
                m = pm[ps] + d0 * d0 + d1 * d1
                if m < new[ns]:
                    new[ns] = m
                    back[t, ns] = ps
        pm = new
    state = 0  # flushed frames end in the zero state
    if not terminated:
        for s in range(1, 4):
            if pm[s] < pm[state]:
                state = s
    decoded = np.empty(n_steps, dtype=np.int64)
    for t in range(n_steps - 1, -1, -1):
        decoded[t] = state >> 1
        state = back[t, state]
    return decoded


def _viterbi_numpy(r, prev_state, branch_out, terminated):
    # Same recursion with the add-compare-select vectorized over states.
    # Sums associate exactly as in the compiled kernel so both paths pick
    # identical survivors even on metric ties.
    n_steps = r.shape[0] // 2
    rr = r.reshape(n_steps, 2)
    bm0 = (rr[:, 0, None, None] - branch_out[None, :, :, 0]) ** 2
    bm1 = (rr[:, 1, None, None] - branch_out[None, :, :, 1]) ** 2
    pm = np.full(4, 1e300)
    pm[0] = 0.0
    back = np.empty((n_steps, 4), dtype=np.int64)
    states = np.arange(4)
    for t in range(n_steps):
        cand = (pm[prev_state] + bm0[t]) + bm1[t]
        j = np.argmin(cand, axis=1)
        back[t] = prev_state[states, j]
        pm = cand[states, j]
    state = 0 if terminated else int(np.argmin(pm))
    decoded = np.empty(n_steps, dtype=np.int64)
    for t in range(n_steps - 1, -1, -1):
        decoded[t] = state >> 1
        state = back[t, state]
    return decoded


def _viterbi(r, prev_state, branch_out, terminated):
    if NUMBA_ENABLED:
        return _viterbi_kernel(r, prev_state, branch_out, terminated)
    return _viterbi_numpy(r, prev_state, branch_out, terminated)


def viterbi_decode(values, n_info: int | None = None) -> np.ndarray:
    """Maximum-likelihood decode of one coded frame.

    ``values`` holds one number per coded bit: 0/1 hard decisions or soft
    reliabilities in [0, 1]. The squared-error branch metric reduces to the
    Hamming metric on hard inputs.

    With ``n_info`` the frame is treated as zero-flushed: the length must be
    2*(n_info + 2), the survivor path is traced from the zero state and the
    two flush bits are dropped. Without it the frame is decoded as-is from
    the best end state and all decoded bits are returned.
    """
    r = np.ascontiguousarray(values, dtype=np.float64)
    if r.ndim != 1 or r.size % 2 != 0 or r.size < 2:
        raise FrameError(f"coded frame length must be even and positive, got {r.size}")
    n_steps = r.size // 2
    if n_info is None:
        return _viterbi(r, _PREV_STATE, _BRANCH_OUT, False)
    if n_steps != n_info + 2:
        raise FrameError(f"expected {2 * (n_info + 2)} coded bits for {n_info} info bits, got {r.size}")
    decoded = _viterbi(r, _PREV_STATE, _BRANCH_OUT, True)
    return decoded[:-2]


def qam64_map(bits) -> np.ndarray:
    """Gray-map bit 6-tuples (3 in-phase bits, then 3 quadrature bits)."""
    b = np.asarray(bits, dtype=np.int64)
    if b.ndim != 1 or b.size % 6 != 0:
        raise FrameError(f"bit count must be a multiple of 6, got {b.size}")
    b = b.reshape(-1, 6)
    i_label = 4 * b[:, 0] + 2 * b[:, 1] + b[:, 2]
    q_label = 4 * b[:, 3] + 2 * b[:, 4] + b[:, 5]
    return QAM_SCALE * (_GRAY_LEVELS[i_label] + 1j * _GRAY_LEVELS[q_label])


def _axis_ranks(x: np.ndarray) -> np.ndarray:
    return np.clip(np.rint((x + 7.0) / 2.0), 0, 7).astype(np.int64)


def _axis_soft_bits(x: np.ndarray) -> np.ndarray:
    # Noise-free-consistent soft value per bit: d0^2 / (d0^2 + d1^2) where
    # d_b is the distance to the nearest level whose label has that bit = b.
    dist2 = (x[:, None] - _SORTED_LEVELS[None, :]) ** 2
    soft = np.empty((x.size, 3))
    for pos in range(3):
        bit1 = _LABEL_BITS[:, pos] == 1
        d1 = dist2[:, bit1].min(axis=1)
        d0 = dist2[:, ~bit1].min(axis=1)
        soft[:, pos] = d0 / (d0 + d1)
    return soft


def qam64_demap(symbols, soft: bool = False) -> np.ndarray:
    """Recover bits from symbols: nearest-point hard decisions by default,
    distance-based soft values in [0, 1] with ``soft=True``."""
    s = np.asarray(symbols, dtype=np.complex128).ravel() / QAM_SCALE
    if soft:
        out = np.empty((s.size, 6))
        out[:, :3] = _axis_soft_bits(s.real)
        out[:, 3:] = _axis_soft_bits(s.imag)
        return out.ravel()
    labels_i = _RANK_TO_LABEL[_axis_ranks(s.real)]
    labels_q = _RANK_TO_LABEL[_axis_ranks(s.imag)]
    out = np.empty((s.size, 6), dtype=np.int64)
    for pos, shift in enumerate((2, 1, 0)):
        out[:, pos] = (labels_i >> shift) & 1
        out[:, 3 + pos] = (labels_q >> shift) & 1
    return out.ravel()


def make_interleaver(rng: np.random.Generator, n_bits: int) -> np.ndarray:
    return rng.permutation(n_bits)


def interleave(bits: np.ndarray, perm: np.ndarray) -> np.ndarray:
    return np.asarray(bits)[perm]


def deinterleave(values: np.ndarray, perm: np.ndarray) -> np.ndarray:
    v = np.asarray(values)
    out = np.empty_like(v)
    out[perm] = v
    return out


def info_bits_per_frame(n_data_tones: int) -> int:
    """Info bits filling one user's data tones: 6 coded bits per tone, rate
    1/2, minus the two flush bits."""
    n = 3 * n_data_tones - 2
    if n < 1:
        raise ConfigError(f"{n_data_tones} data tones cannot carry a coded frame")
    return n


def encode_frame(info_bits: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """Encode (zero-flushed), interleave and map one user's frame to
    data-tone symbols."""
    info = np.asarray(info_bits, dtype=np.int64)
    coded = conv_encode(np.concatenate([info, np.zeros(2, dtype=np.int64)]))
    if coded.size != perm.size:
        raise FrameError(f"interleaver covers {perm.size} bits, frame has {coded.size}")
    return qam64_map(interleave(coded, perm))


def decode_frame(symbols: np.ndarray, perm: np.ndarray, n_info: int, soft: bool = False) -> np.ndarray:
    """Demap, deinterleave and decode one user's received data-tone symbols."""
    values = qam64_demap(symbols, soft=soft)
    return viterbi_decode(deinterleave(values, perm), n_info)


class BerPoint(NamedTuple):
    snr_db: float
    scheme: str
    bits: int
    errors: int

    @property
    def ber(self) -> float:
        return self.errors / self.bits if self.bits else 0.0


def draw_user_frames(
    rng: np.random.Generator,
    il_rng: np.random.Generator,
    tones: ToneMap,
    n_users: int,
):
    """Random coded frames for every user: info bits, interleavers and the
    resulting symbol grid."""
    n_info = info_bits_per_frame(tones.n_data)
    n_coded = 6 * tones.n_data
    info = rng.integers(0, 2, size=(n_users, n_info))
    perms = np.stack([make_interleaver(il_rng, n_coded) for _ in range(n_users)])
    grid = np.zeros((tones.n_tones, n_users), dtype=np.complex128)
    for k in range(n_users):
        grid[tones.data_tones, k] = encode_frame(info[k], perms[k])
    return info, perms, UserSymbols(grid, tones)


def simulate_ber(
    schemes,
    snr_db_grid,
    trials: int,
    seed: int,
    *,
    n_antennas: int,
    n_users: int,
    n_tones: int,
    n_taps: int,
    tones: ToneMap | None = None,
    admm_params: AdmmParams | None = None,
    clip_cfg: ClipConfig | None = None,
    link: LinkConfig | None = None,
) -> list[BerPoint]:
    """Monte-Carlo coded BER per (SNR, scheme).

    All schemes within a trial share the channel, the user frames and the
    unit-variance noise draws, so curves are paired. An SNR of ``inf`` means
    noiseless transmission.
    """
    specs = [s if isinstance(s, SchemeSpec) else parse_scheme(s) for s in schemes]
    snr_grid = [float(v) for v in snr_db_grid]
    tones = tones if tones is not None else default_tone_map(n_tones)
    admm_params = admm_params if admm_params is not None else AdmmParams()
    clip_cfg = clip_cfg if clip_cfg is not None else ClipConfig()
    link = link if link is not None else LinkConfig()
    if trials < 1:
        raise ConfigError(f"need at least one trial, got {trials}")

    n_info = info_bits_per_frame(tones.n_data)
    errors = np.zeros((len(snr_grid), len(specs)), dtype=np.int64)
    bits = np.zeros_like(errors)
    data = tones.data_tones

    for trial in range(trials):
        channels = draw_channel(
            n_users, n_antennas, n_taps, n_tones, streams.substream(seed, trial, streams.CHANNEL)
        )
        info, perms, symbols = draw_user_frames(
            streams.substream(seed, trial, streams.SYMBOLS),
            streams.substream(seed, trial, streams.INTERLEAVER),
            tones,
            n_users,
        )
        x = zf_precode(channels, symbols)
        projectors = (
            build_projectors(channels, tones)
            if any(sp.kind == PROXINF_ADMM for sp in specs)
            else None
        )
        noise_rng = streams.substream(seed, trial, streams.NOISE)
        noise = noise_rng.standard_normal((len(snr_grid), data.size, n_users, 2))
        noise = (noise[..., 0] + 1j * noise[..., 1]) / np.sqrt(2.0)

        h_data = channels.freq[data]
        for si, spec in enumerate(specs):
            xhat = apply_scheme(
                spec, x, channels, tones, admm_params, clip_cfg, projectors=projectors
            ).xhat
            rx_clean = np.einsum("nkm,nm->nk", h_data, xhat.data[data])
            row_power = float(np.linalg.norm(xhat.data) ** 2) / tones.n_tones
            for gi, snr_db in enumerate(snr_grid):
                if np.isinf(snr_db):
                    rx = rx_clean
                else:
                    n0 = row_power / 10.0 ** (snr_db / 10.0)
                    rx = rx_clean + np.sqrt(n0) * noise[gi]
                for k in range(n_users):
                    decoded = decode_frame(rx[:, k], perms[k], n_info, soft=link.soft_metric)
                    errors[gi, si] += int(np.count_nonzero(decoded != info[k]))
                    bits[gi, si] += n_info

    return [
        BerPoint(snr_grid[gi], specs[si].label, int(bits[gi, si]), int(errors[gi, si]))
        for gi in range(len(snr_grid))
        for si in range(len(specs))
    ]
