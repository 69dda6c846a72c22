"""Stream determinism, positional pair consumption and seed derivation."""

import numpy as np
import pytest

from fitwalk.rng import (
    PrimitiveStream,
    derive_seed,
    derive_seeds,
    mix64,
    threshold53,
    uniform_at,
    uniform_block,
)

# frozen at first implementation; the derivation scheme must never drift
GOLDEN_DERIVE_SEED_0_0 = 5197578548964807871


def test_same_seed_same_sequence():
    a = PrimitiveStream(123, q=0.4)
    b = PrimitiveStream(123, q=0.4)
    assert [a.next_pair() for _ in range(50)] == [b.next_pair() for _ in range(50)]


def test_pairs_match_stepwise_bitwise():
    a = PrimitiveStream(99, q=0.4)
    b = PrimitiveStream(99, q=0.4)
    js, us = a.pairs(200)
    for i in range(200):
        j, u = b.next_pair()
        assert bool(js[i]) == bool(j)
        assert us[i] == u


def test_block_matches_scalar():
    block = uniform_block(7, 13, 64)
    scalar = np.array([uniform_at(7, 13 + i) for i in range(64)])
    assert np.array_equal(block, scalar)


def test_skip_is_positional():
    a = PrimitiveStream(5, q=0.3)
    a.skip(10)
    b = PrimitiveStream(5, q=0.3)
    for _ in range(10):
        b.next_pair()
    assert a.next_pair() == b.next_pair()


def test_derive_seed_golden_value():
    assert derive_seed(0, 0) == GOLDEN_DERIVE_SEED_0_0


def test_derive_seed_deterministic_and_vectorized():
    seeds = derive_seeds(20260810, 1000)
    for i in (0, 1, 17, 999):
        assert int(seeds[i]) == derive_seed(20260810, i)


def test_derive_seed_no_collisions_over_1e6():
    seeds = derive_seeds(0xDEADBEEF, 1_000_000)
    assert len(np.unique(seeds)) == 1_000_000


def test_threshold53_reproduces_float_comparison():
    rng = np.random.default_rng(1)
    ms = rng.integers(0, 1 << 53, size=500, dtype=np.uint64)
    for x in (0.4, 2.0 / 3.0, 0.5, 1e-9, 1 - 1e-12):
        t = np.uint64(threshold53(x))
        float_cmp = ms.astype(np.float64) * 2.0**-53 < x
        int_cmp = ms < t
        assert np.array_equal(float_cmp, int_cmp)
    # exact boundary: x representable as m * 2**-53
    for m in (1, 2, 3, 1 << 52):
        x = m * 2.0**-53
        assert (np.uint64(m - 1) < np.uint64(threshold53(x))) == (
            (m - 1) * 2.0**-53 < x
        )
        assert (np.uint64(m) < np.uint64(threshold53(x))) == (m * 2.0**-53 < x)


def test_threshold53_domain():
    with pytest.raises(ValueError):
        threshold53(-0.1)
    with pytest.raises(ValueError):
        threshold53(1.5)


def test_stream_statistics_sane():
    js, us = PrimitiveStream(2024, q=0.4).pairs(200_000)
    assert abs(js.mean() - 0.4) < 0.005
    assert abs(us.mean() - 0.5) < 0.005
    # J and U of the same step are independent draws
    assert abs(np.corrcoef(js.astype(float), us)[0, 1]) < 0.01


def test_mix64_is_bijective_on_samples():
    xs = np.random.default_rng(3).integers(0, 1 << 63, size=1000)
    assert len({mix64(int(x)) for x in xs}) == 1000


def test_stream_rejects_bad_q():
    with pytest.raises(ValueError):
        PrimitiveStream(1, q=0.0)
    with pytest.raises(ValueError):
        PrimitiveStream(1, q=1.0)
