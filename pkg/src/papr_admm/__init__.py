"""Peak-power reduction for a precoded multi-antenna OFDM downlink.

The library simulates a base station that ZF-precodes user symbols onto a
tone grid and then adds a null-space perturbation, found by a double-loop
proximal/ADMM solver, to push down the peak-to-average power ratio of every
antenna's oversampled time signal without disturbing the receivers or the
guard band. Baseline schemes (plain precoding, amplitude clipping), a coded
64-QAM link simulation and a deterministic Monte-Carlo experiment harness
round out the toolkit.
"""

from ._accel import NUMBA_ENABLED
from .admm import AdmmParams, AdmmRunResult, AdmmState, TraceRecord, inner_admm, outer_clip, run, write_trace_csv
from .baselines import ClipConfig, calibrate_clip_ratio, clip_transmit, zf_transmit
from .channel import (
    ChannelSet,
    ToneMap,
    default_tone_map,
    draw_channel,
    dump_tone_map,
    freq_response,
    load_channel,
    load_tone_map,
    save_channel,
)
from .commsim import (
    BerPoint,
    CodeConfig,
    LinkConfig,
    conv_encode,
    decode_frame,
    deinterleave,
    draw_user_frames,
    encode_frame,
    info_bits_per_frame,
    interleave,
    make_interleaver,
    qam64_demap,
    qam64_map,
    simulate_ber,
    viterbi_decode,
)
from .errors import ConfigError, FrameError, RankDeficientError, ShapeError
from .harness import (
    ExperimentConfig,
    PRESETS,
    build_config,
    cmd_ber,
    cmd_ccdf,
    cmd_convergence,
    cmd_demo_signal,
    cmd_lambda_sweep,
)
from .metrics import (
    CcdfCurve,
    TrialRecord,
    ccdf,
    guard_band_power,
    papr_at_ccdf,
    power_increase,
)
from .precoding import ProjectorSet, UserSymbols, build_projectors, mui_residual, zf_precode
from .proximal import ProxResult, clip_levels, proxinf, proxinf_grid
from .schemes import SchemeResult, SchemeSpec, apply_scheme, parse_scheme
from .transforms import (
    PaprValue,
    SignalGrid,
    TimeGrid,
    analyze,
    oversampled_dft,
    oversampled_idft,
    papr,
    papr_per_antenna,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
