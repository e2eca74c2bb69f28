"""Experiment driver: configuration, seeded Monte-Carlo orchestration and
CSV/JSON persistence for every curve the CLI can produce.

Every command is deterministic: a (config, seed) pair yields byte-identical
output files. Floats are written with shortest round-trip formatting and all
files use fixed column orders and newline conventions. Trials derive their
randomness from counter-based substreams, so each trial is reproducible in
isolation and all schemes within a trial share the channel and user frames.
"""

import dataclasses
import json
from dataclasses import dataclass
from importlib import metadata as _importlib_metadata
from pathlib import Path

import numpy as np

from . import streams
from .admm import AdmmParams, run as admm_run
from .baselines import ClipConfig
from .channel import ToneMap, default_tone_map, draw_channel
from .commsim import LinkConfig, draw_user_frames, simulate_ber
from .errors import ConfigError
from .metrics import (
    TRIAL_CSV_HEADER,
    TrialRecord,
    ccdf,
    guard_band_power,
    papr_at_ccdf,
    power_increase,
    trial_csv_rows,
)
from .precoding import build_projectors, mui_residual, zf_precode
from .schemes import PROXINF_ADMM, parse_scheme, apply_scheme
from .transforms import SignalGrid, papr_per_antenna

DEFAULT_SCHEMES = ("zf", "clipping", "proxinf-admm")
DEFAULT_SNR_DB = tuple(float(v) for v in range(-4, 7))
DEFAULT_LAMBDA_GRID = (0.5, 1.0, 2.0, 5.0, 100.0)
DEFAULT_OUTER_GRID = (20, 200)

PRESETS = {
    "full": {},  # the built-in defaults: the large-array reference setup
    "quick": {"trials": 100, "n_tones": 64, "n_antennas": 32, "n_users": 8},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one experiment run."""

    n_antennas: int = 128
    n_users: int = 16
    n_tones: int = 128
    n_taps: int = 8
    oversample: int = 4
    guard_tones: tuple[int, ...] | None = None  # None selects the default map
    schemes: tuple[str, ...] = DEFAULT_SCHEMES
    lam: float = 1.0
    rho: float = 0.5
    outer_iters: int = 200
    inner_iters: int = 2
    trials: int = 1000
    snr_db: tuple[float, ...] = DEFAULT_SNR_DB
    seed: int = 12345
    clip_ratio: float = 1.4
    out_dir: str = "results"

    def __post_init__(self):
        if self.n_users > self.n_antennas:
            raise ConfigError(
                f"users ({self.n_users}) must not exceed antennas ({self.n_antennas})"
            )
        for name in ("n_antennas", "n_users", "n_tones", "n_taps", "oversample", "trials"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.schemes:
            raise ConfigError("at least one scheme is required")
        if not self.snr_db:
            raise ConfigError("the SNR grid must be nonempty")
        object.__setattr__(self, "schemes", tuple(str(s) for s in self.schemes))
        object.__setattr__(self, "snr_db", tuple(float(v) for v in self.snr_db))
        if self.guard_tones is not None:
            object.__setattr__(
                self, "guard_tones", tuple(int(g) for g in self.guard_tones)
            )
        for spec in self.schemes:
            parse_scheme(spec)

    def tone_map(self) -> ToneMap:
        if self.guard_tones is None:
            return default_tone_map(self.n_tones)
        return ToneMap.from_guard_tones(self.n_tones, list(self.guard_tones))

    def admm_params(self, outer_iters: int | None = None, lam: float | None = None) -> AdmmParams:
        return AdmmParams(
            lam=self.lam if lam is None else lam,
            rho=self.rho,
            outer_iters=self.outer_iters if outer_iters is None else outer_iters,
            inner_iters=self.inner_iters,
            oversample=self.oversample,
        )

    def clip_config(self) -> ClipConfig:
        return ClipConfig(clip_ratio=self.clip_ratio)

    def replace(self, **kwargs) -> "ExperimentConfig":
        return dataclasses.replace(self, **kwargs)

    def to_dict(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["schemes"] = list(self.schemes)
        doc["snr_db"] = list(self.snr_db)
        doc["guard_tones"] = None if self.guard_tones is None else list(self.guard_tones)
        return doc


def build_config(
    preset: str | None = None,
    file_values: dict | None = None,
    overrides: dict | None = None,
) -> ExperimentConfig:
    """Layer configuration sources: defaults, then preset, then config file,
    then explicit overrides."""
    values: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choices: {sorted(PRESETS)}")
        values.update(PRESETS[preset])
    field_names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for source in (file_values, overrides):
        if not source:
            continue
        unknown = set(source) - field_names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update({k: v for k, v in source.items() if v is not None})
    return ExperimentConfig(**values)


def _version() -> str:
    try:
        return _importlib_metadata.version("papr-admm")
    except _importlib_metadata.PackageNotFoundError:
        return "0.0.0+local"


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans have no CSV representation here")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: Path, header: str, rows) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")
    return path


def _write_metadata(out_dir: Path, command: str, cfg: ExperimentConfig, extra: dict | None = None) -> Path:
    doc = {"command": command, "config": cfg.to_dict(), "seed": cfg.seed, "version": _version()}
    if extra:
        doc.update(extra)
    path = out_dir / f"{command.replace('-', '_')}_meta.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _prepare_out(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _trial_setup(cfg: ExperimentConfig, tones: ToneMap, trial: int, need_projectors: bool):
    channels = draw_channel(
        cfg.n_users,
        cfg.n_antennas,
        cfg.n_taps,
        cfg.n_tones,
        streams.substream(cfg.seed, trial, streams.CHANNEL),
    )
    _, _, symbols = draw_user_frames(
        streams.substream(cfg.seed, trial, streams.SYMBOLS),
        streams.substream(cfg.seed, trial, streams.INTERLEAVER),
        tones,
        cfg.n_users,
    )
    x = zf_precode(channels, symbols)
    projectors = build_projectors(channels, tones) if need_projectors else None
    return channels, symbols, x, projectors


def cmd_ccdf(cfg: ExperimentConfig) -> list[Path]:
    """Pooled PAPR CCDF per scheme plus per-trial diagnostics."""
    out = _prepare_out(cfg)
    tones = cfg.tone_map()
    specs = [parse_scheme(s) for s in cfg.schemes]
    need_proj = any(sp.kind == PROXINF_ADMM for sp in specs)
    samples: dict[str, list[np.ndarray]] = {sp.label: [] for sp in specs}
    records: list[TrialRecord] = []

    for trial in range(cfg.trials):
        channels, symbols, x, projectors = _trial_setup(cfg, tones, trial, need_proj)
        for sp in specs:
            res = apply_scheme(
                sp, x, channels, tones, cfg.admm_params(), cfg.clip_config(), projectors
            )
            papr = papr_per_antenna(res.y_tx)
            samples[sp.label].append(papr)
            records.append(
                TrialRecord(
                    trial=trial,
                    scheme=sp.label,
                    papr_db=papr,
                    pi_db=power_increase(res.xhat, x),
                    mui_residual=mui_residual(channels, res.xhat, symbols),
                    guard_fraction=guard_band_power(res.xhat, tones),
                    iterations=res.iterations,
                    seed=cfg.seed,
                )
            )

    ccdf_rows = []
    for sp in specs:
        curve = ccdf(np.concatenate(samples[sp.label]))
        for thr, prob in zip(curve.thresholds_db, curve.probabilities):
            ccdf_rows.append(f"{_fmt(thr)},{sp.label},{_fmt(prob)}")
    trial_rows = [row for rec in records for row in trial_csv_rows(rec)]

    return [
        _write_csv(out / "ccdf.csv", "threshold_db,scheme,ccdf", ccdf_rows),
        _write_csv(out / "trials.csv", TRIAL_CSV_HEADER, trial_rows),
        _write_metadata(out, "ccdf", cfg),
    ]


def cmd_convergence(cfg: ExperimentConfig) -> list[Path]:
    """Trial-averaged trace of the perturbation solver per outer iteration."""
    out = _prepare_out(cfg)
    tones = cfg.tone_map()
    params = cfg.admm_params()
    papr = np.zeros(params.outer_iters + 1)
    objective = np.zeros_like(papr)
    power = np.zeros_like(papr)

    for trial in range(cfg.trials):
        channels, _, x, projectors = _trial_setup(cfg, tones, trial, True)
        result = admm_run(x, channels, tones, params, projectors=projectors)
        for rec in result.trace:
            papr[rec.outer_iter] += rec.max_papr_db
            objective[rec.outer_iter] += rec.objective
            power[rec.outer_iter] += rec.perturbation_power

    rows = [
        f"{t},{_fmt(papr[t] / cfg.trials)},{_fmt(objective[t] / cfg.trials)},"
        f"{_fmt(power[t] / cfg.trials)}"
        for t in range(params.outer_iters + 1)
    ]
    return [
        _write_csv(
            out / "convergence.csv",
            "outer_iter,mean_max_papr_db,mean_objective,mean_perturbation_power",
            rows,
        ),
        _write_metadata(out, "convergence", cfg),
    ]


def cmd_lambda_sweep(
    cfg: ExperimentConfig,
    lambda_grid=DEFAULT_LAMBDA_GRID,
    outer_grid=DEFAULT_OUTER_GRID,
) -> list[Path]:
    """Median PAPR and mean power increase per (lambda, iteration budget)."""
    out = _prepare_out(cfg)
    tones = cfg.tone_map()
    lambdas = [float(v) for v in lambda_grid]
    outers = [int(v) for v in outer_grid]
    if not lambdas or not outers:
        raise ConfigError("lambda and outer-iteration grids must be nonempty")

    papr_samples = {(lam, t): [] for lam in lambdas for t in outers}
    pi_values = {(lam, t): [] for lam in lambdas for t in outers}
    for trial in range(cfg.trials):
        channels, _, x, projectors = _trial_setup(cfg, tones, trial, True)
        for lam in lambdas:
            for t_max in outers:
                params = cfg.admm_params(outer_iters=t_max, lam=lam)
                result = admm_run(x, channels, tones, params, projectors=projectors)
                xhat = SignalGrid(x.data + result.delta_x.data)
                papr_samples[(lam, t_max)].append(papr_per_antenna(result.y_tx))
                pi_values[(lam, t_max)].append(power_increase(xhat, x))

    rows = []
    for lam in lambdas:
        for t_max in outers:
            curve = ccdf(np.concatenate(papr_samples[(lam, t_max)]))
            median_db = papr_at_ccdf(curve, 0.5)
            mean_pi = float(np.mean(pi_values[(lam, t_max)]))
            rows.append(f"{_fmt(lam)},{t_max},{_fmt(median_db)},{_fmt(mean_pi)}")
    return [
        _write_csv(out / "sweep.csv", "lam,outer_iters,papr_ccdf50_db,mean_pi_db", rows),
        _write_metadata(
            out,
            "lambda-sweep",
            cfg,
            extra={"lambda_grid": lambdas, "outer_grid": outers},
        ),
    ]


def cmd_ber(cfg: ExperimentConfig) -> list[Path]:
    """Coded BER per (SNR, scheme)."""
    out = _prepare_out(cfg)
    points = simulate_ber(
        cfg.schemes,
        cfg.snr_db,
        cfg.trials,
        cfg.seed,
        n_antennas=cfg.n_antennas,
        n_users=cfg.n_users,
        n_tones=cfg.n_tones,
        n_taps=cfg.n_taps,
        tones=cfg.tone_map(),
        admm_params=cfg.admm_params(),
        clip_cfg=cfg.clip_config(),
        link=LinkConfig(),
    )
    rows = [
        f"{_fmt(p.snr_db)},{p.scheme},{p.bits},{p.errors},{_fmt(p.ber)}" for p in points
    ]
    return [
        _write_csv(out / "ber.csv", "snr_db,scheme,bits_simulated,bit_errors,ber", rows),
        _write_metadata(out, "ber", cfg),
    ]


def cmd_demo_signal(cfg: ExperimentConfig) -> list[Path]:
    """Time and frequency magnitudes of antenna 0 for one realization."""
    out = _prepare_out(cfg)
    tones = cfg.tone_map()
    specs = [parse_scheme(s) for s in cfg.schemes]
    need_proj = any(sp.kind == PROXINF_ADMM for sp in specs)
    channels, _, x, projectors = _trial_setup(cfg, tones, 0, need_proj)

    time_rows: list[str] = []
    freq_rows: list[str] = []
    papr_by_scheme: dict[str, float] = {}
    for sp in specs:
        res = apply_scheme(
            sp, x, channels, tones, cfg.admm_params(), cfg.clip_config(), projectors
        )
        for i, v in enumerate(np.abs(res.y_tx.data[:, 0])):
            time_rows.append(f"{i},{sp.label},{_fmt(v)}")
        for n, v in enumerate(np.abs(res.xhat.data[:, 0])):
            freq_rows.append(f"{n},{sp.label},{_fmt(v)}")
        papr_by_scheme[sp.label] = float(papr_per_antenna(res.y_tx)[0])

    return [
        _write_csv(out / "demo_time.csv", "sample,scheme,magnitude", time_rows),
        _write_csv(out / "demo_freq.csv", "tone,scheme,magnitude", freq_rows),
        _write_metadata(out, "demo-signal", cfg, extra={"papr_db": papr_by_scheme}),
    ]
