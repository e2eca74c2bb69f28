import numpy as np
import pytest

from papr_admm.channel import ToneMap, default_tone_map, draw_channel
from papr_admm.precoding import UserSymbols, zf_precode


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_grid(generator, n_tones, n_antennas):
    re = generator.standard_normal((n_tones, n_antennas))
    im = generator.standard_normal((n_tones, n_antennas))
    return (re + 1j * im) / np.sqrt(2.0)


def random_symbols(generator, tones: ToneMap, n_users: int) -> UserSymbols:
    grid = np.zeros((tones.n_tones, n_users), dtype=np.complex128)
    shape = (tones.n_data, n_users)
    grid[tones.data_tones] = (
        generator.standard_normal(shape) + 1j * generator.standard_normal(shape)
    ) / np.sqrt(2.0)
    return UserSymbols(grid, tones)


@pytest.fixture
def small_instance():
    """A channel/precoder instance small enough for exhaustive checks."""
    generator = rng(42)
    tones = default_tone_map(16, n_guards=4)
    channels = draw_channel(3, 8, 2, 16, generator)
    symbols = random_symbols(generator, tones, 3)
    x = zf_precode(channels, symbols)
    return channels, tones, symbols, x
