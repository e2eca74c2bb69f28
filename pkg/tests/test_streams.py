import numpy as np

from papr_admm import streams
from papr_admm.streams import substream


def test_purpose_constants_are_distinct():
    purposes = (streams.CHANNEL, streams.SYMBOLS, streams.INTERLEAVER, streams.NOISE)
    assert sorted(purposes) == [0, 1, 2, 3]


def test_same_key_same_stream():
    a = substream(99, 4, streams.NOISE).standard_normal(16)
    b = substream(99, 4, streams.NOISE).standard_normal(16)
    np.testing.assert_array_equal(a, b)


def test_different_keys_differ():
    base = substream(99, 4, 0).standard_normal(16)
    for seed, trial, purpose in [(100, 4, 0), (99, 5, 0), (99, 4, 1)]:
        other = substream(seed, trial, purpose).standard_normal(16)
        assert not np.array_equal(base, other)


def test_streams_are_statistically_independent():
    # Adjacent trial keys must not produce correlated draws.
    n = 4000
    a = substream(7, 0, 0).standard_normal(n)
    b = substream(7, 1, 0).standard_normal(n)
    corr = np.corrcoef(a, b)[0, 1]
    assert abs(corr) < 0.05


def test_order_of_creation_is_irrelevant():
    first = substream(11, 2, 1).integers(0, 1000, 8)
    # Creating other streams in between must not disturb the draw.
    substream(11, 0, 0).integers(0, 1000, 8)
    substream(11, 9, 3).integers(0, 1000, 8)
    again = substream(11, 2, 1).integers(0, 1000, 8)
    np.testing.assert_array_equal(first, again)


def test_frozen_anchor_values():
    # Pinned draws guard against silent RNG plumbing changes; a failure here
    # means previously published CSVs are no longer reproducible.
    assert substream(12345, 0, 0).uniform() == 0.8187474262334616
    assert substream(12345, 3, 1).standard_normal() == 1.664278965783322
