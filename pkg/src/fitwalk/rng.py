"""Counter-based uniform streams shared by every simulation path.

All randomness in the package comes from a single primitive: the SplitMix64
finalizer applied to ``seed + (counter + 1) * GOLDEN_GAMMA``.  Draws are pure
functions of ``(seed, counter)``, so the stepwise Python simulators, the
vectorized NumPy helpers and the compiled kernels consume bitwise-identical
uniforms, replica streams need no coordination, and reserving a draw that is
never used costs nothing.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1

#: Stream increment (odd, so ``counter -> counter * GOLDEN_GAMMA`` is a bijection).
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_INV53 = 2.0**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche mix of one 64-bit word."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


def uniform_at(seed: int, index: int) -> float:
    """The ``index``-th uniform of stream ``seed``, in [0, 1), 53-bit resolution."""
    z = mix64((seed + (index + 1) * GOLDEN_GAMMA) & _MASK64)
    return (z >> 11) * _INV53


def uniform_block(seed: int, start: int, count: int) -> np.ndarray:
    """Vectorized ``uniform_at`` for counters ``start .. start + count - 1``."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + (idx + np.uint64(1)) * np.uint64(GOLDEN_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    z ^= z >> np.uint64(31)
    return (z >> np.uint64(11)).astype(np.float64) * _INV53


def derive_seed(master_seed: int, replica_index: int) -> int:
    """Stateless avalanche mix of (master seed, replica index) into a stream seed.

    Injective in ``replica_index`` for a fixed master (every stage is a
    bijection on 64-bit words), so distinct replicas can never collide.
    """
    inner = mix64(((replica_index + 1) * GOLDEN_GAMMA) & _MASK64)
    return mix64((master_seed + inner) & _MASK64)


def derive_seeds(master_seed: int, count: int) -> np.ndarray:
    """Vectorized ``derive_seed`` for replica indices ``0 .. count - 1``."""
    idx = np.arange(count, dtype=np.uint64)
    inner = (idx + np.uint64(1)) * np.uint64(GOLDEN_GAMMA)
    for shift, mult in ((30, _MIX_A), (27, _MIX_B)):
        inner = (inner ^ (inner >> np.uint64(shift))) * np.uint64(mult)
    inner ^= inner >> np.uint64(31)
    z = np.uint64(master_seed & _MASK64) + inner
    for shift, mult in ((30, _MIX_A), (27, _MIX_B)):
        z = (z ^ (z >> np.uint64(shift))) * np.uint64(mult)
    z ^= z >> np.uint64(31)
    return z


def threshold53(x: float) -> int:
    """Integer threshold T with ``(z >> 11) < T  <=>  (z >> 11) * 2**-53 < x``.

    ``x * 2**53`` is exact for floats in [0, 1] (power-of-two scaling), so the
    integer comparison reproduces the float comparison bit for bit.  Compiled
    kernels use this to skip the uint-to-float conversion in hot loops.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"threshold argument must lie in [0, 1], got {x}")
    return math.ceil(x * 2.0**53)


class PrimitiveStream:
    """Positional (J, U) pair source driving the chain simulators.

    Step ``n`` consumes counters ``2n`` (death indicator ``J ~ Bernoulli(q)``)
    and ``2n + 1`` (fitness draw ``U ~ uniform[0,1)``).  The fitness counter is
    reserved even on steps that never look at it, so the full and reduced
    simulators, and the compiled kernels, all see identical randomness at
    identical step indices.
    """

    __slots__ = ("seed", "q", "_step")

    def __init__(self, seed: int, q: float):
        if not 0.0 < q < 1.0:
            raise ValueError(f"death probability q must lie in (0, 1), got {q}")
        self.seed = seed & _MASK64
        self.q = q
        self._step = 0

    @property
    def step(self) -> int:
        """Number of (J, U) pairs consumed so far."""
        return self._step

    def next_pair(self) -> tuple[int, float]:
        """Consume one step: returns (J, U) with J in {0, 1}."""
        base = 2 * self._step
        u0 = uniform_at(self.seed, base)
        u1 = uniform_at(self.seed, base + 1)
        self._step += 1
        return (1 if u0 < self.q else 0), u1

    def pairs(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """Consume ``count`` steps at once; identical values to ``next_pair`` loops."""
        if count < 0:
            raise ValueError("count must be non-negative")
        block = uniform_block(self.seed, 2 * self._step, 2 * count)
        self._step += count
        return block[0::2] < self.q, block[1::2]

    def skip(self, count: int) -> None:
        """Advance past ``count`` steps without computing the draws."""
        if count < 0:
            raise ValueError("count must be non-negative")
        self._step += count
