import numpy as np
import pytest

from papr_admm.baselines import (
    ClipConfig,
    calibrate_clip_ratio,
    clip_transmit,
    zf_transmit,
)
from papr_admm.errors import ConfigError
from papr_admm.metrics import guard_band_power, power_increase
from papr_admm.transforms import SignalGrid, analyze, papr_per_antenna, synthesize

from conftest import rng


def test_zf_transmit_is_pure_synthesis(small_instance):
    _, _, _, x = small_instance
    got = zf_transmit(x, 4)
    want = synthesize(x, 4)
    np.testing.assert_array_equal(got.data, want.data)
    assert got.oversample == 4


def test_clip_clamps_at_gamma_rms(small_instance):
    _, _, _, x = small_instance
    cfg = ClipConfig(clip_ratio=1.2)
    clipped, image = clip_transmit(x, 4, cfg)
    reference = zf_transmit(x, 4).data
    rms = np.sqrt(np.mean(np.abs(reference) ** 2, axis=0))
    assert np.all(np.abs(clipped.data) <= 1.2 * rms[None, :] + 1e-12)
    # Phases survive wherever the signal is nonzero.
    mask = np.abs(reference) > 1e-12
    np.testing.assert_allclose(
        np.angle(clipped.data[mask]), np.angle(reference[mask]), atol=1e-12
    )
    # The frequency image is the analysis of the clipped signal.
    np.testing.assert_allclose(image.data, analyze(clipped).data, atol=1e-14)


def test_huge_ratio_is_identity(small_instance):
    _, _, _, x = small_instance
    clipped, image = clip_transmit(x, 2, ClipConfig(clip_ratio=1e6))
    np.testing.assert_allclose(clipped.data, zf_transmit(x, 2).data, atol=0)
    np.testing.assert_allclose(image.data, x.data, atol=1e-12)


def test_clipping_reduces_papr_and_power(small_instance):
    _, tones, _, x = small_instance
    clipped, image = clip_transmit(x, 4, ClipConfig(clip_ratio=1.2))
    before = papr_per_antenna(zf_transmit(x, 4))
    after = papr_per_antenna(clipped)
    assert np.all(after <= before + 1e-9)
    assert power_increase(image, x) <= 0.0
    # In-band damage: clipping leaks energy into the guard band.
    assert guard_band_power(image, tones) > 0.0
    assert guard_band_power(x, tones) == 0.0


def test_clip_rejects_zero_antenna():
    x = SignalGrid(np.zeros((4, 2), dtype=complex) + np.eye(4, 2))
    x_zero = SignalGrid(np.concatenate([x.data[:, :1], np.zeros((4, 1))], axis=1))
    with pytest.raises(ConfigError):
        clip_transmit(x_zero, 2, ClipConfig())


def test_clip_config_validation():
    with pytest.raises(ConfigError):
        ClipConfig(clip_ratio=0.0)
    with pytest.raises(ConfigError):
        ClipConfig(clip_ratio=-1.0)
    assert ClipConfig().clip_ratio == pytest.approx(1.4)


def test_calibrate_clip_ratio_hits_target(small_instance):
    _, _, _, x = small_instance
    unclipped = papr_per_antenna(zf_transmit(x, 4)).max()
    target = 0.6 * unclipped
    gamma = calibrate_clip_ratio(x, 4, target, tol_db=0.01)
    clipped, _ = clip_transmit(x, 4, ClipConfig(clip_ratio=gamma))
    got = papr_per_antenna(clipped).max()
    assert got == pytest.approx(target, abs=0.02)


def test_calibrate_clip_ratio_rejects_unreachable(small_instance):
    _, _, _, x = small_instance
    unclipped = papr_per_antenna(zf_transmit(x, 4)).max()
    with pytest.raises(ConfigError):
        calibrate_clip_ratio(x, 4, unclipped + 1.0)
    with pytest.raises(ConfigError):
        calibrate_clip_ratio(x, 4, -1.0)
