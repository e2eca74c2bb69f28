"""Counter-based RNG streams for reproducible Monte-Carlo trials.

Every (seed, trial, purpose) triple maps to an independent generator, so a
single trial can be re-run in isolation and trials can execute in any order
or in parallel without changing results.
"""

import numpy as np

CHANNEL = 0
SYMBOLS = 1
INTERLEAVER = 2
NOISE = 3


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream identified by (seed, *key)."""
    seq = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))
