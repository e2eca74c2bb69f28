import json

import pytest

from papr_admm.cli import main


BASE = [
    "--antennas", "8",
    "--users", "3",
    "--tones", "16",
    "--taps", "2",
    "--trials", "2",
    "--outer", "3",
]


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_demo_signal_runs_and_prints_paths(tmp_path, capsys):
    code, out, err = run_cli(
        capsys, "demo-signal", *BASE, "--out", str(tmp_path)
    )
    assert code == 0
    assert err == ""
    printed = out.splitlines()
    assert len(printed) == 3
    for line in printed:
        assert (tmp_path / line.split("/")[-1]).exists()


def test_ccdf_command_writes_files(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "ccdf", *BASE, "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "ccdf.csv").exists()
    assert (tmp_path / "trials.csv").exists()


def test_ber_command_with_snr_flag(tmp_path, capsys):
    code, _, _ = run_cli(
        capsys, "ber", *BASE, "--snr", "inf,0", "--out", str(tmp_path)
    )
    assert code == 0
    meta = json.loads((tmp_path / "ber_meta.json").read_text())
    assert meta["config"]["snr_db"] == [float("inf"), 0.0]


def test_scheme_flag_repeats(tmp_path, capsys):
    code, _, _ = run_cli(
        capsys,
        "ccdf", *BASE,
        "--scheme", "zf",
        "--scheme", "proxinf-admm:2",
        "--out", str(tmp_path),
    )
    assert code == 0
    meta = json.loads((tmp_path / "ccdf_meta.json").read_text())
    assert meta["config"]["schemes"] == ["zf", "proxinf-admm:2"]


def test_flags_override_config_file_and_preset(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"antennas": 12, "users": 3, "trials": 3}))
    code, _, _ = run_cli(
        capsys,
        "demo-signal",
        "--preset", "quick",
        "--config", str(config),
        "--antennas", "8",
        "--tones", "16",
        "--taps", "2",
        "--outer", "2",
        "--out", str(tmp_path / "results"),
    )
    assert code == 0
    meta = json.loads((tmp_path / "results" / "demo_signal_meta.json").read_text())
    cfg = meta["config"]
    assert cfg["n_antennas"] == 8  # flag beats the config file
    assert cfg["trials"] == 3  # config file beats the preset (quick: 100)
    assert cfg["n_tones"] == 16  # flag beats the preset (quick: 64)
    assert cfg["n_users"] == 3


def test_config_file_guard_tones(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"guard-tones": "0,15"}))
    code, _, _ = run_cli(
        capsys,
        "demo-signal", *BASE,
        "--config", str(config),
        "--out", str(tmp_path / "results"),
    )
    assert code == 0
    meta = json.loads((tmp_path / "results" / "demo_signal_meta.json").read_text())
    assert meta["config"]["guard_tones"] == [0, 15]


def test_lambda_sweep_grid_flags(tmp_path, capsys):
    code, _, _ = run_cli(
        capsys,
        "lambda-sweep", *BASE,
        "--trials", "1",
        "--lambda-grid", "0.5,1",
        "--outer-grid", "2",
        "--out", str(tmp_path),
    )
    assert code == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(lines) == 3
    meta = json.loads((tmp_path / "lambda_sweep_meta.json").read_text())
    assert meta["lambda_grid"] == [0.5, 1.0]
    assert meta["outer_grid"] == [2]


def test_bad_inputs_exit_2(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "ccdf", *BASE, "--scheme", "mystery", "--out", str(tmp_path)
    )
    assert code == 2
    assert "error:" in err

    code, _, err = run_cli(
        capsys, "ccdf", "--config", str(tmp_path / "missing.json")
    )
    assert code == 2
    assert "not found" in err

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"warp": 9}))
    code, _, err = run_cli(capsys, "ccdf", "--config", str(bad))
    assert code == 2
    assert "unknown config key" in err

    notjson = tmp_path / "broken.json"
    notjson.write_text("{nope")
    code, _, err = run_cli(capsys, "ccdf", "--config", str(notjson))
    assert code == 2

    code, _, err = run_cli(capsys, "ber", *BASE, "--snr", "two,three")
    assert code == 2


def test_cli_reruns_are_byte_identical(tmp_path, capsys):
    args = ("convergence", *BASE, "--out", str(tmp_path))
    assert run_cli(capsys, *args)[0] == 0
    first = (tmp_path / "convergence.csv").read_bytes()
    assert run_cli(capsys, *args)[0] == 0
    assert (tmp_path / "convergence.csv").read_bytes() == first
