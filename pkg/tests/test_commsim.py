import numpy as np
import pytest

from papr_admm.channel import default_tone_map
from papr_admm.commsim import (
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
from papr_admm.commsim import _BRANCH_OUT, _PREV_STATE, _viterbi_kernel, _viterbi_numpy
from papr_admm.errors import ConfigError, FrameError

from conftest import rng

QAM_SCALE = 1.0 / np.sqrt(42.0)


def all_qam_label_bits() -> np.ndarray:
    return np.array(
        [(v >> shift) & 1 for v in range(64) for shift in range(5, -1, -1)], dtype=np.int64
    )


def test_conv_encode_known_vector():
    np.testing.assert_array_equal(
        conv_encode([1, 0, 0]), np.array([1, 1, 0, 1, 1, 1])
    )


def test_conv_encode_zero_and_length():
    out = conv_encode(np.zeros(10, dtype=int))
    np.testing.assert_array_equal(out, np.zeros(20, dtype=int))
    assert conv_encode([1]).size == 2
    assert conv_encode([]).size == 0


def test_conv_encode_is_linear():
    generator = rng(50)
    for _ in range(20):
        a = generator.integers(0, 2, 31)
        b = generator.integers(0, 2, 31)
        np.testing.assert_array_equal(conv_encode(a ^ b), conv_encode(a) ^ conv_encode(b))


def test_conv_encode_validation():
    with pytest.raises(FrameError):
        conv_encode([[1, 0]])
    with pytest.raises(FrameError):
        conv_encode([0, 2, 1])


def flushed(bits: np.ndarray) -> np.ndarray:
    return conv_encode(np.concatenate([bits, np.zeros(2, dtype=np.int64)]))


def test_viterbi_roundtrip_clean():
    generator = rng(51)
    for _ in range(10):
        bits = generator.integers(0, 2, 512)
        np.testing.assert_array_equal(viterbi_decode(conv_encode(bits)), bits)
        np.testing.assert_array_equal(viterbi_decode(flushed(bits), 512), bits)


def test_viterbi_corrects_any_single_flip():
    generator = rng(52)
    bits = generator.integers(0, 2, 512)
    coded = flushed(bits)
    for pos in range(coded.size):
        corrupted = coded.copy()
        corrupted[pos] ^= 1
        np.testing.assert_array_equal(viterbi_decode(corrupted, 512), bits)


def test_viterbi_corrects_separated_double_flips():
    generator = rng(53)
    bits = generator.integers(0, 2, 256)
    coded = flushed(bits)
    for start in (0, 100, 300):
        corrupted = coded.copy()
        corrupted[start] ^= 1
        corrupted[start + 40] ^= 1  # far apart: independent error events
        np.testing.assert_array_equal(viterbi_decode(corrupted, 256), bits)


def test_viterbi_soft_values():
    generator = rng(54)
    bits = generator.integers(0, 2, 128)
    coded = flushed(bits).astype(float)
    # Mild soft noise that flips no hard decision.
    noisy = np.clip(coded + generator.uniform(-0.3, 0.3, coded.size), 0.0, 1.0)
    np.testing.assert_array_equal(viterbi_decode(noisy, 128), bits)


def test_viterbi_all_zero_input():
    np.testing.assert_array_equal(viterbi_decode(np.zeros(20)), np.zeros(10))
    np.testing.assert_array_equal(viterbi_decode(np.zeros(20), n_info=8), np.zeros(8))


def test_viterbi_validation():
    with pytest.raises(FrameError):
        viterbi_decode(np.zeros(7))  # odd
    with pytest.raises(FrameError):
        viterbi_decode(np.zeros(0))  # empty
    with pytest.raises(FrameError):
        viterbi_decode(np.zeros(20), n_info=5)  # 20 != 2*(5+2)


def test_qam64_constellation_energy_and_alphabet():
    symbols = qam64_map(all_qam_label_bits())
    assert symbols.size == 64
    assert np.mean(np.abs(symbols) ** 2) == pytest.approx(1.0, rel=1e-12)
    levels = np.unique(np.round(symbols.real / QAM_SCALE).astype(int))
    np.testing.assert_array_equal(levels, [-7, -5, -3, -1, 1, 3, 5, 7])


def test_qam64_roundtrip_all_labels():
    bits = all_qam_label_bits()
    np.testing.assert_array_equal(qam64_demap(qam64_map(bits)), bits)


def test_qam64_gray_adjacency():
    # Walk each axis in amplitude order; consecutive labels differ by one bit.
    bits = all_qam_label_bits().reshape(64, 6)
    symbols = qam64_map(bits.ravel())
    axis_bits = {}
    for b, s in zip(bits, symbols):
        level = int(np.round(s.real / QAM_SCALE))
        axis_bits[level] = tuple(b[:3])
    levels = sorted(axis_bits)
    for lo, hi in zip(levels[:-1], levels[1:]):
        diff = sum(a != b for a, b in zip(axis_bits[lo], axis_bits[hi]))
        assert diff == 1, f"levels {lo}->{hi} differ in {diff} bits"


def test_qam64_demap_nearest_point():
    generator = rng(55)
    bits = generator.integers(0, 2, 6 * 200)
    symbols = qam64_map(bits)
    # Perturbations below half the level spacing never change the decision.
    wobble = (generator.uniform(-0.9, 0.9, 200) + 1j * generator.uniform(-0.9, 0.9, 200)) * QAM_SCALE
    np.testing.assert_array_equal(qam64_demap(symbols + wobble), bits)
    # Far outside the grid still clamps to the nearest edge point.
    np.testing.assert_array_equal(
        qam64_demap(np.array([100.0 + 100.0j])), qam64_demap(np.array([7.0 + 7.0j]) * QAM_SCALE)
    )


def test_qam64_soft_demap_consistency():
    bits = all_qam_label_bits()
    soft = qam64_demap(qam64_map(bits), soft=True)
    assert np.all((soft >= 0) & (soft <= 1))
    np.testing.assert_array_equal(soft.round().astype(int), bits)


def test_qam64_map_validation():
    with pytest.raises(FrameError):
        qam64_map([1, 0, 1])


def test_interleaver_is_a_bijection():
    generator = rng(56)
    perm = make_interleaver(generator, 100)
    assert sorted(perm) == list(range(100))
    values = generator.standard_normal(100)
    np.testing.assert_array_equal(deinterleave(interleave(values, perm), perm), values)


def test_info_bits_per_frame():
    assert info_bits_per_frame(114) == 340
    assert info_bits_per_frame(1) == 1
    with pytest.raises(ConfigError):
        info_bits_per_frame(0)


def test_frame_roundtrip():
    generator = rng(57)
    tones = default_tone_map(32, n_guards=4)
    n_info = info_bits_per_frame(tones.n_data)
    info = generator.integers(0, 2, n_info)
    perm = make_interleaver(generator, 6 * tones.n_data)
    symbols = qam64_map(interleave(flushed(info), perm))
    assert symbols.size == tones.n_data
    np.testing.assert_array_equal(decode_frame(symbols, perm, n_info), info)
    np.testing.assert_array_equal(encode_frame(info, perm), symbols)
    with pytest.raises(FrameError):
        encode_frame(info, make_interleaver(generator, 12))


def test_draw_user_frames_layout():
    tones = default_tone_map(32, n_guards=4)
    info, perms, symbols = draw_user_frames(rng(58), rng(59), tones, 3)
    assert info.shape == (3, info_bits_per_frame(tones.n_data))
    assert perms.shape == (3, 6 * tones.n_data)
    assert np.all(symbols.symbols[tones.guard_tones] == 0)
    data = symbols.symbols[tones.data_tones]
    levels = np.round(data.real / QAM_SCALE).astype(int)
    assert np.isin(levels, [-7, -5, -3, -1, 1, 3, 5, 7]).all()
    # Decoding each user's clean frame recovers the drawn info bits.
    for k in range(3):
        np.testing.assert_array_equal(
            decode_frame(data[:, k], perms[k], info.shape[1]), info[k]
        )


def test_simulate_ber_noiseless_and_noisy():
    points = simulate_ber(
        ["zf", "proxinf-admm:3", "clipping"],
        [np.inf, -10.0],
        2,
        123,
        n_antennas=8,
        n_users=2,
        n_tones=16,
        n_taps=2,
    )
    by_key = {(p.snr_db, p.scheme): p for p in points}
    n_info = info_bits_per_frame(default_tone_map(16).n_data)
    for p in points:
        assert p.bits == 2 * 2 * n_info
    # Null-space-respecting schemes are exact without noise.
    assert by_key[(np.inf, "zf")].errors == 0
    assert by_key[(np.inf, "proxinf-admm:3")].errors == 0
    # Deep noise produces errors for everyone.
    assert by_key[(-10.0, "zf")].errors > 0
    assert by_key[(-10.0, "clipping")].errors > 0
    assert by_key[(-10.0, "zf")].ber == pytest.approx(
        by_key[(-10.0, "zf")].errors / by_key[(-10.0, "zf")].bits
    )


def test_simulate_ber_is_deterministic():
    kwargs = dict(n_antennas=8, n_users=2, n_tones=16, n_taps=2)
    a = simulate_ber(["zf"], [-8.0], 3, 99, **kwargs)
    b = simulate_ber(["zf"], [-8.0], 3, 99, **kwargs)
    assert a == b
    c = simulate_ber(["zf"], [-8.0], 3, 100, **kwargs)
    assert a != c


def test_simulate_ber_validation():
    with pytest.raises(ConfigError):
        simulate_ber(["zf"], [0.0], 0, 1, n_antennas=4, n_users=2, n_tones=8, n_taps=2)


def test_code_config_validation():
    with pytest.raises(ConfigError):
        CodeConfig(generators=(7, 5))
    with pytest.raises(ConfigError):
        CodeConfig(flush_bits=3)
    assert LinkConfig().soft_metric is False


def test_viterbi_paths_agree_bit_for_bit():
    generator = rng(31)
    for terminated in (False, True):
        for _ in range(20):
            r = generator.uniform(-0.2, 1.2, 2 * 60)
            fast = _viterbi_kernel(r, _PREV_STATE, _BRANCH_OUT, terminated)
            slow = _viterbi_numpy(r, _PREV_STATE, _BRANCH_OUT, terminated)
            np.testing.assert_array_equal(fast, slow)
