"""Excursion decomposition of the below-threshold population process.

An excursion of L starts at an arrival at 0 and lasts until (excluding) the
next return to 0 from 1.  It splits into a holding phase at zero (length
``h_tilde``, geometric with parameter p*f; the step that moves L to 1 is
included) and a return leg of ``alpha`` steps.  The skeleton length ``tau``
counts the excursion's moves with self-transitions removed; at the critical
threshold the skeleton is distributed as a simple symmetric random walk
return excursion, which this module also samples directly for cross-checks.
``mu`` counts the death events that fall inside the holding phase; those are
exactly the events the occupation count eta accumulates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import ModelParams
from .rng import PrimitiveStream, threshold53, uniform_block

log = logging.getLogger(__name__)

#: default per-walk step budget before a sample is censored and redrawn
DEFAULT_CAP = 100_000_000


class ExcursionCensored(RuntimeError):
    """Raised when a single sampled excursion exceeds its step budget."""


@dataclass(frozen=True)
class ExcursionRecord:
    """Observables of one excursion: index, start step, holding time at zero,
    return time from 1, skeleton length and zero-phase death count."""

    k: int
    sigma: int
    h_tilde: int
    alpha: int
    tau: int
    mu: int

    @property
    def duration(self) -> int:
        return self.h_tilde + self.alpha

    def check(self) -> None:
        assert self.h_tilde >= 1 and self.alpha >= 1 and self.mu >= 0
        assert self.tau >= 2 and self.tau % 2 == 0
        assert self.alpha >= self.tau - 1


def sample_excursion(
    params: ModelParams, stream: PrimitiveStream, cap: int = DEFAULT_CAP, k: int = 1
) -> ExcursionRecord:
    """One complete excursion measured from the simulated (L, J) path.

    Consumes the stream's positional pairs exactly like the trajectory
    simulators, so decompositions and trajectories driven by the same seed
    line up step for step.  Raises ExcursionCensored if the excursion runs
    past ``cap`` steps.
    """
    sigma = stream.step
    h = 0
    mu = 0
    while True:
        j, u = stream.next_pair()
        if j:
            mu += 1
            h += 1
        else:
            h += 1
            if u < params.f:
                break
        if h >= cap:
            raise ExcursionCensored(f"holding phase exceeded {cap} steps")
    level = 1
    alpha = 0
    tau = 1
    total = h
    while level > 0:
        j, u = stream.next_pair()
        if j:
            level -= 1
            tau += 1
        elif u < params.f:
            level += 1
            tau += 1
        alpha += 1
        total += 1
        if total >= cap and level > 0:
            raise ExcursionCensored(f"excursion exceeded {cap} steps")
    return ExcursionRecord(k=k, sigma=sigma, h_tilde=h, alpha=alpha, tau=tau, mu=mu)


@dataclass
class ExcursionBatch:
    """Arrays of excursion observables from one sequential stream.

    Censored excursions (duration at the cap) are excluded and counted;
    ``start`` keeps the true path step at which each kept excursion began.
    """

    params: ModelParams
    seed: int
    cap: int
    start: np.ndarray
    h_tilde: np.ndarray
    alpha: np.ndarray
    tau: np.ndarray
    mu: np.ndarray
    censored: int

    CSV_HEADER = "k,sigma,h_tilde,alpha,tau,mu"

    def __len__(self) -> int:
        return len(self.h_tilde)

    def record(self, i: int) -> ExcursionRecord:
        return ExcursionRecord(
            k=i + 1,
            sigma=int(self.start[i]),
            h_tilde=int(self.h_tilde[i]),
            alpha=int(self.alpha[i]),
            tau=int(self.tau[i]),
            mu=int(self.mu[i]),
        )

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.CSV_HEADER + "\n")
            for i in range(len(self)):
                fh.write(
                    f"{i + 1},{self.start[i]},{self.h_tilde[i]},"
                    f"{self.alpha[i]},{self.tau[i]},{self.mu[i]}\n"
                )


def sample_excursions(
    params: ModelParams, m: int, seed: int, cap: int = DEFAULT_CAP
) -> ExcursionBatch:
    """``m`` kept excursions via the compiled kernel (censored ones logged)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    start, h, a, t, mu, censored = _kernels.excursion_batch(
        np.uint64(seed), threshold53(params.q), threshold53(params.f), m, int(cap)
    )
    if censored:
        log.info("excursion sampling: %d censored at cap %d", censored, cap)
    return ExcursionBatch(
        params=params,
        seed=seed,
        cap=int(cap),
        start=start,
        h_tilde=h,
        alpha=a,
        tau=t,
        mu=mu,
        censored=int(censored),
    )


def sample_mu(params: ModelParams, m: int, seed: int) -> np.ndarray:
    """Zero-phase death counts of ``m`` excursions.

    Simulates holding phases only: the return leg contributes nothing to mu
    and is independent of every later holding phase, so the sampled law is
    identical to full-path excursion sampling at a fraction of the cost.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    return _kernels.mu_batch(
        np.uint64(seed), threshold53(params.q), threshold53(params.f), m
    )


@dataclass
class ExcursionAggregates:
    """Cumulative durations of real and modified excursions.

    ``V[i]`` is the total duration of the first i+1 excursions; ``V_prime``
    replaces each zero-holding draw by its coupled Geom(2q) partner (same
    uniform through both inverse CDFs, so ``h_prime <= h_tilde`` holds
    pointwise and V dominates V_prime on every path); ``T`` accumulates the
    skeleton lengths.
    """

    V: np.ndarray
    V_prime: np.ndarray
    T: np.ndarray
    h_prime: np.ndarray

    @property
    def m(self) -> int:
        return len(self.V)

    def N(self, k):
        """Counting process: number of excursions completed by time k.

        Right-continuous inverse of V: ``V[N(k)-1] <= k < V[N(k)]``.
        """
        return np.searchsorted(self.V, np.asarray(k), side="right")


def aggregate_excursions(batch: ExcursionBatch, coupling_seed: int) -> ExcursionAggregates:
    """Build V, V' and T from a batch, with the monotone holding-time coupling.

    For each excursion the realized holding time ``h`` is mapped back to a
    uniform via the distributional transform ``u = F(h-1) + v (F(h) - F(h-1))``
    (v a fresh uniform), and the modified draw is the Geom(2q) inverse CDF at
    the same u.  This keeps the realized h, gives the replacement its exact
    marginal law, and makes the dominance ``V >= V'`` a pointwise invariant,
    which is asserted.
    """
    params = batch.params
    p, q = params.p, params.q
    h = batch.h_tilde.astype(np.float64)
    v = uniform_block(coupling_seed, 0, len(batch))
    # log(1 - u) with u the transported uniform: 1 - u = p**(h-1) * (1 - v q)
    log_tail = (h - 1.0) * math.log(p) + np.log1p(-v * q)
    h_prime = np.ceil(log_tail / math.log1p(-2.0 * q)).astype(np.int64)
    h_prime = np.maximum(h_prime, 1)
    if not np.all(h_prime <= batch.h_tilde):
        raise AssertionError("holding-time coupling violated h_prime <= h_tilde")
    V = np.cumsum(batch.h_tilde + batch.alpha)
    V_prime = np.cumsum(h_prime + batch.alpha)
    if not np.all(V >= V_prime):
        raise AssertionError("coupled dominance V >= V_prime violated")
    return ExcursionAggregates(V=V, V_prime=V_prime, T=np.cumsum(batch.tau), h_prime=h_prime)


@dataclass
class SandwichCheck:
    """Occupation count versus excursion sums along one shared stream."""

    checkpoints: np.ndarray
    eta: np.ndarray
    N: np.ndarray
    mu: np.ndarray
    lower: np.ndarray  # sum of the first N mu values at each checkpoint
    upper: np.ndarray  # sum of the first N+1 mu values
    holds: bool
    tight: int  # checkpoints where the lower bound is attained with equality
    eta_over_N: float | None


def occupation_vs_excursions(
    n: int, params: ModelParams, seed: int, checkpoints=None
) -> SandwichCheck:
    """Drive a trajectory and its excursion decomposition from one stream and
    verify ``sum_{k<=N} mu_k <= eta <= sum_{k<=N+1} mu_k`` at every checkpoint.

    The lower comparison is weak by design: equality occurs whenever the open
    excursion has contributed no deaths yet, and such checkpoints are counted
    in ``tight`` rather than treated as failures.
    """
    if not params.is_critical:
        raise ValueError("occupation_vs_excursions requires the critical threshold")
    if n < 0:
        raise ValueError("n must be non-negative")
    if checkpoints is None:
        cps = _default_checkpoints(n)
    else:
        cps = np.unique(np.asarray(list(checkpoints) + [n], dtype=np.int64))
        if len(cps) and (cps[0] < 0 or cps[-1] > n):
            raise ValueError(f"checkpoints must lie in [0, {n}]")
    q = params.q
    mu_cap = int(8.0 * math.sqrt(2.0 * q * max(n, 4)) + 4096)
    status, n_mu, mu, etas, ns = _kernels.sandwich_path(
        np.uint64(seed), threshold53(q), threshold53(params.f), cps, mu_cap, 10_000_000
    )
    if status == 2:
        raise RuntimeError("excursion count exceeded the preallocated bound")
    if status == 1:
        raise RuntimeError("open holding phase failed to close within the tail guard")
    mu = mu[:n_mu]
    cum = np.concatenate(([0], np.cumsum(mu)))
    lower = cum[ns]
    upper = cum[ns + 1]
    holds = bool(np.all(lower <= etas) and np.all(etas <= upper))
    tight = int(np.sum(lower == etas))
    n_term = int(ns[-1])
    ratio = float(etas[-1]) / n_term if n_term > 0 else None
    return SandwichCheck(
        checkpoints=cps,
        eta=etas,
        N=ns,
        mu=mu,
        lower=lower,
        upper=upper,
        holds=holds,
        tight=tight,
        eta_over_N=ratio,
    )


def _default_checkpoints(n: int) -> np.ndarray:
    if n == 0:
        return np.array([0], dtype=np.int64)
    pts = np.unique(
        np.concatenate(
            [
                np.logspace(0, math.log10(n), num=25).astype(np.int64),
                np.array([n], dtype=np.int64),
            ]
        )
    )
    return pts[(pts >= 0) & (pts <= n)]


# ---------------------------------------------------------------------------
# simple symmetric random walk reference samplers
# ---------------------------------------------------------------------------


def sample_srw_return_times(m: int, seed: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """``m`` return times to zero of the simple symmetric walk.

    Direct stepping, no closed-form shortcut; walks that run past ``cap``
    steps are censored, excluded and redrawn, with the count logged.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    times, censored = _kernels.srw_return_times(np.uint64(seed), m, int(cap))
    if censored:
        log.info("srw return-time sampling: %d censored at cap %d", censored, cap)
    return times


def ladder_times(height: int, seed: int, cap: int = 10**10) -> tuple[np.ndarray, np.ndarray]:
    """First-passage epochs gamma_1..gamma_height and their increments."""
    if height < 1:
        raise ValueError("height must be at least 1")
    gamma, reached = _kernels.srw_ladder(np.uint64(seed), height, int(cap))
    if reached < height:
        raise RuntimeError(f"walk reached level {reached} < {height} within {cap} steps")
    increments = np.diff(gamma, prepend=0)
    return gamma, increments


def stable_scaling_sample(
    m: int, replicas: int, seed: int, cap: int = DEFAULT_CAP
) -> np.ndarray:
    """Independent replicas of T_m / m^2, T_m the total length of m walk excursions."""
    if m < 1 or replicas < 1:
        raise ValueError("m and replicas must be at least 1")
    totals, censored = _kernels.stable_T_batch(np.uint64(seed), m, replicas, int(cap))
    total_censored = int(censored.sum())
    if total_censored:
        log.info(
            "stable scaling sample: %d censored walks at cap %d across %d replicas",
            total_censored,
            cap,
            replicas,
        )
    return totals.astype(np.float64) / float(m) ** 2


@dataclass(frozen=True)
class SrwExcursionOracle:
    """Independent sampler of walk return times and ladder epochs."""

    seed: int
    cap: int = DEFAULT_CAP

    def return_times(self, m: int) -> np.ndarray:
        return sample_srw_return_times(m, self.seed, self.cap)

    def ladder(self, height: int) -> tuple[np.ndarray, np.ndarray]:
        return ladder_times(height, self.seed, self.cap)
