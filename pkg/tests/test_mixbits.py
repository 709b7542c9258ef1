"""Tests for the counter-based uniform streams.

The finalizer is pinned to the published splitmix64 reference sequence, so
a regression in the arithmetic cannot hide behind a matching reimplementation
bug: the expected values below were not produced by this package.
"""

import numpy as np
import pytest

from rdbp._mixbits import (
    CLAIM_STREAM,
    MASK64,
    OFFSPRING_STREAM,
    RESOURCE_STREAM,
    mix64,
    stream_prefix,
    uniform_at,
    uniforms,
)

# Reference splitmix64 outputs for initial state 1234567 (public test
# vectors for the algorithm; the finalizer here consumes state + k*GOLDEN).
_GOLDEN = 0x9E3779B97F4A7C15
_SPLITMIX_1234567 = [
    6457827717110365317,
    3203168211198807973,
    9817491932198370423,
    4593380528125082431,
    16408922859458223821,
]


def test_matches_published_splitmix64_sequence():
    state = 1234567
    for expected in _SPLITMIX_1234567:
        assert mix64(state) == expected
        state = (state + _GOLDEN) & MASK64


def test_known_single_values():
    # First outputs for states 0 and 1, also public vectors.
    assert mix64(0) == 0xE220A8397B1DCDAF
    assert mix64(1) == 0x910A2DEC89025CC1
    assert mix64((1 << 64) - 1) == 0xE4D971771B652C20


def test_independent_reimplementation_agrees():
    # Step-by-step restatement with explicit masking after every operation.
    def other(z):
        z = (z + 0x9E3779B97F4A7C15) % 2**64
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 % 2**64
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB % 2**64
        return (z ^ (z >> 31)) % 2**64

    rng = np.random.default_rng(7)
    for z in rng.integers(0, 2**64, size=200, dtype=np.uint64):
        z = int(z)
        assert mix64(z) == other(z)


def test_scalar_and_vector_paths_agree():
    seed, run, gen = 987654321, 12, 34
    for stream in (OFFSPRING_STREAM, CLAIM_STREAM, RESOURCE_STREAM):
        vec = uniforms(seed, stream, run, gen, 64, first_slot=5)
        for i in range(64):
            assert vec[i] == uniform_at(seed, stream, run, gen, 5 + i)


def test_unit_interval_and_spread():
    u = uniforms(3, CLAIM_STREAM, 0, 0, 100_000)
    assert u.min() >= 0.0
    assert u.max() < 1.0
    # Crude uniformity check; the real distributional test runs through
    # the quantile transforms in test_distributions.
    assert abs(u.mean() - 0.5) < 0.01


def test_streams_are_distinct():
    a = uniforms(1, OFFSPRING_STREAM, 0, 0, 16)
    b = uniforms(1, CLAIM_STREAM, 0, 0, 16)
    c = uniforms(1, RESOURCE_STREAM, 0, 0, 16)
    assert not np.array_equal(a, b)
    assert not np.array_equal(b, c)


def test_key_components_matter():
    base = uniforms(5, CLAIM_STREAM, 1, 2, 8)
    assert not np.array_equal(base, uniforms(6, CLAIM_STREAM, 1, 2, 8))
    assert not np.array_equal(base, uniforms(5, CLAIM_STREAM, 2, 2, 8))
    assert not np.array_equal(base, uniforms(5, CLAIM_STREAM, 1, 3, 8))


def test_first_slot_is_an_offset_not_a_reseed():
    whole = uniforms(11, CLAIM_STREAM, 0, 0, 20)
    tail = uniforms(11, CLAIM_STREAM, 0, 0, 12, first_slot=8)
    assert np.array_equal(whole[8:], tail)


def test_replay_is_exact():
    a = uniforms(99, RESOURCE_STREAM, 7, 3, 1000)
    b = uniforms(99, RESOURCE_STREAM, 7, 3, 1000)
    assert np.array_equal(a, b)


def test_negative_count_rejected():
    with pytest.raises(ValueError):
        uniforms(1, CLAIM_STREAM, 0, 0, -1)


def test_zero_count_gives_empty():
    assert uniforms(1, CLAIM_STREAM, 0, 0, 0).size == 0


def test_prefix_chain_order_sensitivity():
    # Absorbing (run, generation) in the other order must not collide.
    assert stream_prefix(1, CLAIM_STREAM, 2, 3) != stream_prefix(1, CLAIM_STREAM, 3, 2)
