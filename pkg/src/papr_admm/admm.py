"""Double-loop solver for the null-space perturbation design.

Given a precoded frequency grid X, the solver devises an additive
perturbation grid dX whose data-tone rows lie in the per-tone channel null
spaces and whose guard rows are exactly zero, such that the oversampled
time-domain signal of X + dX has low peaks. The outer loop clips the current
time signal with the infinity-norm prox; the inner loop fits dX to the
clipped target by a few ADMM sweeps of a quadratic update (Z), a per-tone
null-space projection (D) and a dual ascent (U):

    Z <- (L*At + rho*D + U) / (L + rho),   At = analyze(V)
    D[n] <- (Z[n] - U[n]/rho) @ G[n]^T     on data tones, 0 on guards
    U <- U + rho*(D - Z)

The Z step is the exact minimizer of the augmented Lagrangian for every
oversampling factor L; for L = 1 the denominator reduces to (1 + rho). Each
outer iterate is feasible by construction, so the run can be stopped at any
iteration (or early via ``papr_target_db``) without creating interference or
out-of-band radiation.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .channel import ChannelSet, ToneMap
from .errors import ConfigError, ShapeError
from .precoding import ProjectorSet, build_projectors
from .proximal import _clamp_moduli, clip_levels
from .transforms import SignalGrid, TimeGrid, oversampled_dft, oversampled_idft


@dataclass(frozen=True)
class AdmmParams:
    """Solver parameters; defaults follow the reference large-array setup."""

    lam: float = 1.0
    rho: float = 0.5
    outer_iters: int = 200
    inner_iters: int = 2
    oversample: int = 4
    weights: np.ndarray | None = None  # per-antenna clip weights, default all ones
    papr_target_db: float | None = None  # optional early exit threshold

    def __post_init__(self):
        if self.lam <= 0:
            raise ConfigError(f"lam must be positive, got {self.lam}")
        if self.rho <= 0:
            raise ConfigError(f"rho must be positive, got {self.rho}")
        if self.outer_iters < 1 or self.inner_iters < 1:
            raise ConfigError("iteration budgets must be at least 1")
        if self.oversample < 1:
            raise ConfigError(f"oversample must be >= 1, got {self.oversample}")

    def weight_vector(self, n_antennas: int) -> np.ndarray:
        if self.weights is None:
            return np.ones(n_antennas)
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (n_antennas,):
            raise ConfigError(f"weights must have shape ({n_antennas},), got {w.shape}")
        return w


class TraceRecord(NamedTuple):
    outer_iter: int
    max_papr_db: float
    objective: float
    perturbation_power: float


@dataclass
class AdmmState:
    """Mutable solver state passed to the per-iteration hook."""

    delta_x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    d: np.ndarray
    u: np.ndarray
    t: int
    trace: list = field(default_factory=list)


class AdmmRunResult(NamedTuple):
    delta_x: SignalGrid
    y_tx: TimeGrid
    trace: list


def outer_clip(x: SignalGrid, delta_x: SignalGrid, params: AdmmParams) -> TimeGrid:
    """One outer step: synthesize X + dX and clip each antenna column."""
    if x.data.shape != delta_x.data.shape:
        raise ShapeError(f"grid shapes differ: {x.data.shape} vs {delta_x.data.shape}")
    q = oversampled_idft(x.data + delta_x.data, params.oversample)
    w = params.weight_vector(x.n_antennas)
    levels = clip_levels(np.abs(q), params.lam * w / 2.0)
    return TimeGrid(_clamp_moduli(q, levels), oversample=params.oversample)


def _inner_admm(
    v: np.ndarray,
    oversample: int,
    projectors: ProjectorSet,
    data_tones: np.ndarray,
    d: np.ndarray,
    u: np.ndarray,
    params: AdmmParams,
    state: AdmmState | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    ell = float(oversample)
    rho = params.rho
    scaled_target = ell * oversampled_dft(v, oversample)
    z = np.zeros_like(d)
    for _ in range(params.inner_iters):
        z = (scaled_target + rho * d + u) / (ell + rho)
        d = np.zeros_like(z)
        d[data_tones] = projectors.project_rows(z[data_tones] - u[data_tones] / rho)
        u = u + rho * (d - z)
    if state is not None:
        state.z = z
    return d, u


def inner_admm(
    v: TimeGrid,
    projectors: ProjectorSet,
    warm: tuple[SignalGrid, SignalGrid],
    params: AdmmParams,
) -> tuple[SignalGrid, SignalGrid]:
    """Run the inner ADMM sweeps on target V with warm-start (D, U).

    The returned D satisfies the null-space and guard constraints exactly by
    construction.
    """
    d0, u0 = warm
    if d0.data.shape != u0.data.shape:
        raise ShapeError("warm-start grids must share a shape")
    if v.n_tones != d0.n_tones:
        raise ShapeError(f"target has {v.n_tones} tones, warm start has {d0.n_tones}")
    if projectors.n_antennas != d0.n_antennas:
        raise ConfigError("projector antenna count does not match the grids")
    d, u = _inner_admm(
        v.data,
        v.oversample,
        projectors,
        projectors.data_tones,
        d0.data.copy(),
        u0.data.copy(),
        params,
    )
    return SignalGrid(d), SignalGrid(u)


def _objective(y: np.ndarray, tx: np.ndarray, lam: float, w: np.ndarray) -> float:
    peaks = np.abs(y).max(axis=0)
    fit = np.linalg.norm(y - tx) ** 2
    return float(lam * (w * peaks).sum() + fit)


def _max_papr_db(tx: np.ndarray) -> float:
    power = np.abs(tx) ** 2
    ratios = power.max(axis=0) * power.shape[0] / power.sum(axis=0)
    return float(10.0 * np.log10(ratios.max()))


def run(
    x: SignalGrid,
    channels: ChannelSet,
    tones: ToneMap,
    params: AdmmParams,
    projectors: ProjectorSet | None = None,
    on_iterate: Callable[[AdmmState], None] | None = None,
) -> AdmmRunResult:
    """Full double-loop run; returns the perturbation, the transmit signal
    and the per-iteration trace.

    Trace row 0 describes the unperturbed signal (dX = 0); row t the state
    after outer iteration t. The PAPR column always refers to the actual
    transmit signal synthesize(X + dX), not to the clipped auxiliary Y.
    """
    if x.n_tones != channels.n_tones or x.n_antennas != channels.n_antennas:
        raise ShapeError(
            f"grid {x.data.shape} does not match channel "
            f"({channels.n_tones} tones, {channels.n_antennas} antennas)"
        )
    if projectors is None:
        projectors = build_projectors(channels, tones)
    elif not np.array_equal(projectors.data_tones, tones.data_tones):
        raise ConfigError("projector tone set does not match the tone map")
    ell = params.oversample
    w = params.weight_vector(x.n_antennas)
    data = tones.data_tones

    base = oversampled_idft(x.data, ell)  # time signal of X alone
    delta = np.zeros_like(x.data)
    tx = base
    state = AdmmState(
        delta_x=delta, y=base, z=np.zeros_like(delta), d=delta, u=np.zeros_like(delta), t=0
    )
    state.trace.append(TraceRecord(0, _max_papr_db(base), _objective(base, base, params.lam, w), 0.0))

    for t in range(1, params.outer_iters + 1):
        levels = clip_levels(np.abs(tx), params.lam * w / 2.0)
        y = _clamp_moduli(tx, levels)
        v = y - base
        d, u = _inner_admm(
            v, ell, projectors, data, delta.copy(), np.zeros_like(delta), params, state
        )
        delta = d
        tx = base + oversampled_idft(delta, ell)
        papr_db = _max_papr_db(tx)
        state.delta_x, state.y, state.d, state.u, state.t = delta, y, d, u, t
        state.trace.append(
            TraceRecord(
                t,
                papr_db,
                _objective(y, tx, params.lam, w),
                float(np.linalg.norm(delta) ** 2),
            )
        )
        if on_iterate is not None:
            on_iterate(state)
        if params.papr_target_db is not None and papr_db <= params.papr_target_db:
            break

    return AdmmRunResult(SignalGrid(delta), TimeGrid(tx, oversample=ell), state.trace)


def write_trace_csv(path, trace) -> None:
    """Persist a run trace with fixed columns and round-trip float formatting."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("outer_iter,max_papr_db,objective,perturbation_power\n")
        for rec in trace:
            fh.write(
                f"{rec.outer_iter},{rec.max_papr_db!r},{rec.objective!r},"
                f"{rec.perturbation_power!r}\n"
            )
