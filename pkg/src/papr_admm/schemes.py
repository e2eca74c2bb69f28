"""Transmit-scheme dispatch shared by the experiment commands.

A scheme string is either a bare name (``zf``, ``clipping``, ``proxinf-admm``)
or ``proxinf-admm:T`` to cap the outer iterations at T, which lets one
experiment compare iteration budgets as separate curves.
"""

import dataclasses
from typing import NamedTuple

from . import admm
from .baselines import ClipConfig, clip_transmit, zf_transmit
from .channel import ChannelSet, ToneMap
from .errors import ConfigError
from .precoding import ProjectorSet
from .transforms import SignalGrid, TimeGrid

ZF = "zf"
CLIPPING = "clipping"
PROXINF_ADMM = "proxinf-admm"
KNOWN_SCHEMES = (ZF, CLIPPING, PROXINF_ADMM)


class SchemeSpec(NamedTuple):
    label: str  # scheme string as written, used in CSV output
    kind: str
    outer_iters: int | None  # iteration cap, proxinf-admm only


def parse_scheme(text: str) -> SchemeSpec:
    label = text.strip()
    kind, sep, suffix = label.partition(":")
    if kind not in KNOWN_SCHEMES:
        raise ConfigError(f"unknown scheme {label!r}; expected one of {KNOWN_SCHEMES}")
    if not sep:
        return SchemeSpec(label, kind, None)
    if kind != PROXINF_ADMM:
        raise ConfigError(f"only {PROXINF_ADMM} accepts an iteration suffix, got {label!r}")
    try:
        outer = int(suffix)
    except ValueError:
        outer = 0
    if outer < 1:
        raise ConfigError(f"iteration suffix must be a positive integer, got {label!r}")
    return SchemeSpec(label, kind, outer)


class SchemeResult(NamedTuple):
    xhat: SignalGrid  # frequency grid actually transmitted
    y_tx: TimeGrid  # oversampled time signal actually transmitted
    iterations: int
    trace: list | None


def apply_scheme(
    spec: SchemeSpec,
    x: SignalGrid,
    channels: ChannelSet,
    tones: ToneMap,
    admm_params: admm.AdmmParams,
    clip_cfg: ClipConfig,
    projectors: ProjectorSet | None = None,
) -> SchemeResult:
    """Transform the precoded grid ``x`` according to the scheme."""
    oversample = admm_params.oversample
    if spec.kind == ZF:
        return SchemeResult(x, zf_transmit(x, oversample), 0, None)
    if spec.kind == CLIPPING:
        y, image = clip_transmit(x, oversample, clip_cfg)
        return SchemeResult(image, y, 0, None)
    params = admm_params
    if spec.outer_iters is not None:
        params = dataclasses.replace(params, outer_iters=spec.outer_iters)
    result = admm.run(x, channels, tones, params, projectors=projectors)
    xhat = SignalGrid(x.data + result.delta_x.data)
    return SchemeResult(xhat, result.y_tx, len(result.trace) - 1, result.trace)
