"""Command-line entry point for the experiment commands.

Configuration layering, lowest to highest precedence: built-in defaults,
``--preset``, ``--config`` JSON file, explicit flags. The config file uses
the flag names as keys (``{"antennas": 64, "snr": "6,8,10"}``).
"""

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError
from .harness import (
    DEFAULT_LAMBDA_GRID,
    DEFAULT_OUTER_GRID,
    PRESETS,
    build_config,
    cmd_ber,
    cmd_ccdf,
    cmd_convergence,
    cmd_demo_signal,
    cmd_lambda_sweep,
)

_FLAG_TO_FIELD = {
    "antennas": "n_antennas",
    "users": "n_users",
    "tones": "n_tones",
    "taps": "n_taps",
    "oversample": "oversample",
    "lambda": "lam",
    "rho": "rho",
    "outer": "outer_iters",
    "inner": "inner_iters",
    "trials": "trials",
    "seed": "seed",
    "snr": "snr_db",
    "scheme": "schemes",
    "clip-ratio": "clip_ratio",
    "out": "out_dir",
    "guard-tones": "guard_tones",
}


def _parse_float_list(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    try:
        return tuple(float(tok) for tok in str(text).split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated number list, got {text!r}") from exc


def _parse_int_list(text) -> tuple[int, ...]:
    return tuple(int(v) for v in _parse_float_list(text))


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file; flags override it")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named parameter preset")
    p.add_argument("--antennas", type=int, help="transmit antennas M")
    p.add_argument("--users", type=int, help="single-antenna users K")
    p.add_argument("--tones", type=int, help="OFDM tones N")
    p.add_argument("--taps", type=int, help="channel taps D")
    p.add_argument("--oversample", type=int, help="time-domain oversampling factor L")
    p.add_argument("--lambda", dest="lam", type=float, help="peak-penalty weight")
    p.add_argument("--rho", type=float, help="inner-solver penalty parameter")
    p.add_argument("--outer", type=int, help="outer iterations")
    p.add_argument("--inner", type=int, help="inner iterations per outer step")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials")
    p.add_argument("--seed", type=int, help="master RNG seed")
    p.add_argument("--snr", help="comma-separated SNR grid in dB (inf allowed)")
    p.add_argument(
        "--scheme",
        action="append",
        help="transmit scheme (repeatable): zf, clipping, proxinf-admm[:T]",
    )
    p.add_argument("--clip-ratio", dest="clip_ratio", type=float, help="clip level over RMS")
    p.add_argument("--out", dest="out_dir", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="papr-admm",
        description="Peak-power reduction experiments for a precoded multi-antenna OFDM downlink",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("ccdf", "PAPR exceedance curves per scheme"),
        ("ber", "coded BER versus SNR per scheme"),
        ("convergence", "trial-averaged solver trace"),
        ("lambda-sweep", "PAPR and power increase over a lambda grid"),
        ("demo-signal", "time/frequency magnitudes of one realization"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
        if name == "lambda-sweep":
            p.add_argument("--lambda-grid", help="comma-separated lambda values")
            p.add_argument("--outer-grid", help="comma-separated outer-iteration budgets")
    return parser


def _load_config_file(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return _translate(doc)


def _translate(flag_values: dict) -> dict:
    values = {}
    for key, value in flag_values.items():
        field = _FLAG_TO_FIELD.get(str(key).replace("_", "-"), None)
        if field is None:
            raise ConfigError(f"unknown config key {key!r}")
        if field == "snr_db":
            value = _parse_float_list(value)
        elif field == "guard_tones" and value is not None:
            value = _parse_int_list(value)
        elif field == "schemes":
            value = tuple(value) if isinstance(value, (list, tuple)) else (str(value),)
        values[field] = value
    return values


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_values = _load_config_file(args.config)
        overrides = {}
        for flag, field in _FLAG_TO_FIELD.items():
            if flag == "guard-tones":
                continue  # config-file only
            dest = {"lambda": "lam", "out": "out_dir"}.get(flag, flag.replace("-", "_"))
            value = getattr(args, dest, None)
            if value is None:
                continue
            if field == "snr_db":
                value = _parse_float_list(value)
            elif field == "schemes":
                value = tuple(value)
            overrides[field] = value
        cfg = build_config(args.preset, file_values, overrides)

        if args.command == "ccdf":
            written = cmd_ccdf(cfg)
        elif args.command == "ber":
            written = cmd_ber(cfg)
        elif args.command == "convergence":
            written = cmd_convergence(cfg)
        elif args.command == "lambda-sweep":
            lambda_grid = (
                _parse_float_list(args.lambda_grid)
                if args.lambda_grid is not None
                else DEFAULT_LAMBDA_GRID
            )
            outer_grid = (
                _parse_int_list(args.outer_grid)
                if args.outer_grid is not None
                else DEFAULT_OUTER_GRID
            )
            written = cmd_lambda_sweep(cfg, lambda_grid, outer_grid)
        else:
            written = cmd_demo_signal(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
