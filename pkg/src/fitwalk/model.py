"""Exact simulation of the fitness-marked birth-death chain.

At each step a birth occurs with probability p and the newborn receives an
independent uniform fitness mark; otherwise the least-fit living species dies
(a death attempted on an empty population does nothing).  A threshold f splits
the living population into the below-threshold count L and the rest R, and the
counters B (births at or above threshold), eta (deaths attempted while L = 0)
and C (deaths attempted while the population is empty) track the cumulative
flows the statistical experiments consume.  The death surplus
``delta = B - R`` satisfies the path identity ``delta = eta - C`` at every
step.

Two modes produce identical counter paths from the same primitive stream:

* ``full`` keeps the population in a heap keyed by (fitness, birth index), so
  deaths remove the exact minimum and the surviving fitness marks are
  available for distributional tests;
* ``reduced`` keeps O(1) counters only, using the fact that the population
  minimum lies below the threshold exactly when L > 0.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .rng import PrimitiveStream, threshold53

#: steps simulated per block when streaming pair draws in full mode
_CHUNK = 1 << 20


@dataclass(frozen=True)
class ModelParams:
    """Model instance: birth probability p and fitness threshold f.

    The death probability ``q = 1 - p`` and the critical threshold
    ``f_c = q / p`` are derived, never stored, so they cannot drift out of
    sync with p.
    """

    p: float
    f: float

    def __post_init__(self):
        if not 0.5 < self.p < 1.0:
            raise ValueError(
                f"birth probability p must satisfy 1/2 < p < 1, got {self.p}"
            )
        if not 0.0 < self.f < 1.0:
            raise ValueError(f"fitness threshold f must lie in (0, 1), got {self.f}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def f_c(self) -> float:
        return self.q / self.p

    @property
    def is_critical(self) -> bool:
        """True when f equals q/p bit for bit (see ``at_critical``)."""
        return self.f == self.f_c

    @classmethod
    def at_critical(cls, p: float) -> "ModelParams":
        """Instance with f set to the critical threshold, exact in binary arithmetic."""
        q = 1.0 - p
        return cls(p=p, f=q / p)

    def as_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "f": self.f, "f_c": self.f_c}


@dataclass(frozen=True)
class StepOutcome:
    """What one step did: a birth (with the newborn's fitness), a death (with
    the removed fitness in full mode) or a hold on the empty population."""

    kind: str  # "birth" | "death" | "hold"
    fitness: float | None = None


@dataclass
class TrajectoryState:
    """Mutable simulation state; ``population`` is None in reduced mode."""

    n: int = 0
    X: int = 0
    L: int = 0
    B: int = 0
    eta: int = 0
    C: int = 0
    births: int = 0
    population: list | None = None

    @classmethod
    def initial(cls, mode: str = "reduced") -> "TrajectoryState":
        if mode not in ("full", "reduced"):
            raise ValueError(f"mode must be 'full' or 'reduced', got {mode!r}")
        return cls(population=[] if mode == "full" else None)

    @property
    def is_full(self) -> bool:
        return self.population is not None

    @property
    def R(self) -> int:
        return self.X - self.L

    @property
    def delta(self) -> int:
        return self.B - self.X + self.L

    @property
    def s(self) -> int:
        """Indicator of the empty population."""
        return 1 if self.X == 0 else 0

    def check(self, params: ModelParams | None = None) -> None:
        """Assert the structural invariants; cheap enough for test loops."""
        assert self.X >= 0 and self.L >= 0 and self.R >= 0
        assert self.delta >= 0
        assert self.delta == self.eta - self.C
        if self.is_full:
            assert len(self.population) == self.X
            if params is not None:
                assert sum(1 for fit, _ in self.population if fit < params.f) == self.L


def step_full(
    state: TrajectoryState, params: ModelParams, j: int, u: float
) -> tuple[TrajectoryState, StepOutcome]:
    """Advance one step in full mode; mutates and returns ``state``.

    ``j`` is the death indicator for this step, ``u`` the positional fitness
    draw (consumed only on births).  eta increments exactly when j = 1 and the
    pre-step L is zero; C increments when the death hits an empty population.
    """
    if not state.is_full:
        raise ValueError("step_full requires a full-mode state")
    if j:
        if state.L == 0:
            state.eta += 1
        if state.X == 0:
            state.C += 1
            outcome = StepOutcome("hold")
        else:
            fit, _ = heapq.heappop(state.population)
            state.X -= 1
            if fit < params.f:
                state.L -= 1
            outcome = StepOutcome("death", fit)
    else:
        heapq.heappush(state.population, (u, state.births))
        state.births += 1
        state.X += 1
        if u < params.f:
            state.L += 1
        else:
            state.B += 1
        outcome = StepOutcome("birth", u)
    state.n += 1
    return state, outcome


def step_reduced(
    state: TrajectoryState, params: ModelParams, j: int, u: float
) -> TrajectoryState:
    """Advance one step in reduced mode; mutates and returns ``state``.

    On a death with X > 0 the removed species is below threshold exactly when
    L > 0 (the population minimum lives in the below-threshold block whenever
    that block is non-empty), so no fitness store is needed.
    """
    if state.is_full:
        raise ValueError("step_reduced requires a reduced-mode state")
    if j:
        if state.L == 0:
            state.eta += 1
            if state.X == 0:
                state.C += 1
            else:
                state.X -= 1  # above-threshold death: delta grows by 1
        else:
            state.X -= 1
            state.L -= 1
    else:
        state.X += 1
        if u < params.f:
            state.L += 1
        else:
            state.B += 1
    state.n += 1
    return state


@dataclass
class TrajectorySeries:
    """Counter snapshots at the requested checkpoints plus the terminal step."""

    params: ModelParams
    seed: int
    mode: str
    steps: np.ndarray
    X: np.ndarray
    L: np.ndarray
    R: np.ndarray
    B: np.ndarray
    delta: np.ndarray
    eta: np.ndarray
    C: np.ndarray
    terminal_fitness: np.ndarray | None = None

    CSV_HEADER = "step,X,L,R,B,Delta,eta,C"

    def terminal(self) -> dict:
        i = -1
        return {
            "step": int(self.steps[i]),
            "X": int(self.X[i]),
            "L": int(self.L[i]),
            "R": int(self.R[i]),
            "B": int(self.B[i]),
            "Delta": int(self.delta[i]),
            "eta": int(self.eta[i]),
            "C": int(self.C[i]),
        }

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.CSV_HEADER + "\n")
            for i in range(len(self.steps)):
                fh.write(
                    f"{self.steps[i]},{self.X[i]},{self.L[i]},{self.R[i]},"
                    f"{self.B[i]},{self.delta[i]},{self.eta[i]},{self.C[i]}\n"
                )

    def write_fitness_sidecar(self, path) -> None:
        """Terminal living fitness marks, one per line, 17 significant digits."""
        if self.terminal_fitness is None:
            raise ValueError("fitness sidecar requires a full-mode trajectory")
        with open(path, "w") as fh:
            for v in self.terminal_fitness:
                fh.write(f"{v:.17g}\n")


def _normalize_checkpoints(checkpoints, n_steps: int) -> np.ndarray:
    if checkpoints is None:
        cps = [n_steps]
    else:
        cps = list(checkpoints)
        if any(cps[i] > cps[i + 1] for i in range(len(cps) - 1)):
            raise ValueError("checkpoints must be sorted ascending")
        if cps and (cps[0] < 0 or cps[-1] > n_steps):
            raise ValueError(f"checkpoints must lie in [0, {n_steps}]")
        if not cps or cps[-1] != n_steps:
            cps.append(n_steps)
    return np.unique(np.asarray(cps, dtype=np.int64))


def run_trajectory(
    params: ModelParams,
    n_steps: int,
    seed: int,
    mode: str = "reduced",
    checkpoints=None,
) -> TrajectorySeries:
    """Simulate ``n_steps`` steps and snapshot the counters at each checkpoint.

    Reduced mode runs in a compiled kernel with O(1) memory; full mode runs in
    Python with the heap population and additionally records the terminal
    multiset of living fitness marks.  Both consume the pair stream
    positionally, so their counter paths agree exactly for any seed.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    if mode not in ("full", "reduced"):
        raise ValueError(f"mode must be 'full' or 'reduced', got {mode!r}")
    cps = _normalize_checkpoints(checkpoints, n_steps)

    if mode == "reduced":
        counters = _kernels.reduced_trajectory(
            np.uint64(seed), threshold53(params.q), threshold53(params.f), cps
        )
        X, L, B, eta, C = (counters[:, i].copy() for i in range(5))
        terminal_fitness = None
    else:
        state = TrajectoryState.initial("full")
        stream = PrimitiveStream(seed, params.q)
        rows = np.zeros((len(cps), 5), dtype=np.int64)
        ci = 0
        done = 0
        while ci < len(cps) and cps[ci] == done:
            rows[ci] = (state.X, state.L, state.B, state.eta, state.C)
            ci += 1
        while done < n_steps:
            take = min(_CHUNK, n_steps - done)
            js, us = stream.pairs(take)
            for k in range(take):
                step_full(state, params, 1 if js[k] else 0, us[k])
                done += 1
                while ci < len(cps) and cps[ci] == done:
                    rows[ci] = (state.X, state.L, state.B, state.eta, state.C)
                    ci += 1
        X, L, B, eta, C = (rows[:, i].copy() for i in range(5))
        terminal_fitness = np.sort(np.array([fit for fit, _ in state.population]))

    return TrajectorySeries(
        params=params,
        seed=seed,
        mode=mode,
        steps=cps,
        X=X,
        L=L,
        R=X - L,
        B=B,
        delta=B - X + L,
        eta=eta,
        C=C,
        terminal_fitness=terminal_fitness,
    )


def surviving_fitness_above(state: TrajectoryState, threshold: float) -> np.ndarray:
    """Sorted living fitness marks at or above ``threshold`` (full mode only)."""
    if not state.is_full:
        raise ValueError("surviving_fitness_above requires a full-mode state")
    vals = [fit for fit, _ in state.population if fit >= threshold]
    return np.sort(np.asarray(vals, dtype=np.float64))
