"""Empirical-distribution machinery and the hypothesis tests the experiments use.

Only what the verification suites need: one- and two-sample Kolmogorov-Smirnov
distances with asymptotic p-values, a Pearson chi-square goodness test, the
running statistic for the iterated-logarithm band check, and a normal-theory
confidence interval.  Test outcomes travel as ``TestReport`` records.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .analytic import lil_envelope


@dataclass(frozen=True)
class EmpiricalSample:
    """Sorted observations; construct via ``from_values`` to get the sorting."""

    values: np.ndarray

    @classmethod
    def from_values(cls, values) -> "EmpiricalSample":
        arr = np.sort(np.asarray(values, dtype=np.float64))
        if arr.size == 0:
            raise ValueError("empty sample")
        return cls(values=arr)

    @property
    def n(self) -> int:
        return len(self.values)


def ks_statistic(sample: EmpiricalSample, cdf) -> float:
    """Two-sided sup distance between the empirical CDF and ``cdf``.

    Standard order-statistics form: the sup is attained at a jump of the
    empirical CDF, from above or below, so
    ``D = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)``.
    """
    x = sample.values
    n = sample.n
    f = np.asarray(cdf(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(max(d_plus, d_minus, 0.0))


def kolmogorov_sf(lam: float) -> float:
    """Asymptotic Kolmogorov survival function ``2 sum (-1)^{j-1} exp(-2 j^2 lam^2)``.

    The alternating series is truncated once a term drops below 1e-12; the
    result is clamped to [0, 1].
    """
    if lam <= 0:
        return 1.0
    total = 0.0
    sign = 1.0
    for j in range(1, 100_000):
        term = math.exp(-2.0 * j * j * lam * lam)
        total += sign * term
        if term < 1e-12:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_pvalue(d: float, n: int) -> float:
    """Asymptotic p-value of the one-sample KS distance ``d`` at sample size ``n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if d < 0 or d > 1:
        raise ValueError(f"KS distance must lie in [0, 1], got {d}")
    return kolmogorov_sf(math.sqrt(n) * d)


def two_sample_ks(a: EmpiricalSample, b: EmpiricalSample) -> tuple[float, float]:
    """Two-sample sup distance and its asymptotic p-value.

    Evaluated at every jump point of both empirical CDFs, which handles the
    heavy ties of integer-valued samples; the p-value uses the effective size
    ``n_a n_b / (n_a + n_b)``.
    """
    grid = np.concatenate([a.values, b.values])
    grid.sort(kind="mergesort")
    fa = np.searchsorted(a.values, grid, side="right") / a.n
    fb = np.searchsorted(b.values, grid, side="right") / b.n
    d = float(np.max(np.abs(fa - fb)))
    n_eff = a.n * b.n / (a.n + b.n)
    return d, kolmogorov_sf(math.sqrt(n_eff) * d)


def merge_tail_bins(
    counts, probs, min_expected: float = 5.0
) -> tuple[np.ndarray, np.ndarray]:
    """Fold trailing bins into the last kept one until every expected count
    reaches ``min_expected``; total count is preserved."""
    counts = np.asarray(counts, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    n = counts.sum()
    keep = len(probs)
    while keep > 1 and n * probs[keep - 1 :].sum() < min_expected:
        keep -= 1
    merged_counts = np.concatenate([counts[: keep - 1], [counts[keep - 1 :].sum()]])
    merged_probs = np.concatenate([probs[: keep - 1], [probs[keep - 1 :].sum()]])
    return merged_counts, merged_probs


def chi_square_goodness(counts, probs) -> tuple[float, int, float]:
    """Pearson statistic, degrees of freedom and p-value.

    ``probs`` must sum to 1 and give every bin an expected count of at least
    5 (merge tails with ``merge_tail_bins`` first); the p-value comes from the
    regularized upper incomplete gamma function.
    """
    counts = np.asarray(counts, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    if len(counts) != len(probs) or len(counts) < 2:
        raise ValueError("need matching count/probability bins, at least two")
    if abs(probs.sum() - 1.0) > 1e-9 or np.any(probs <= 0):
        raise ValueError("bin probabilities must be positive and sum to 1")
    n = counts.sum()
    expected = n * probs
    if np.any(expected < 5.0):
        raise ValueError("degenerate binning: an expected count is below 5")
    stat = float(np.sum((counts - expected) ** 2 / expected))
    dof = len(counts) - 1
    p = float(special.gammaincc(dof / 2.0, stat / 2.0))
    return stat, dof, p


def lil_tracker(steps, deltas, q: float) -> np.ndarray:
    """Running sup of ``delta / envelope`` along checkpoints of one trajectory.

    The envelope is increasing and delta is a step function, so feeding every
    delta jump point (plus the terminal step) yields the exact path supremum.
    All checkpoints must be at least 16 so the envelope is defined.
    """
    steps = np.asarray(steps, dtype=np.float64)
    deltas = np.asarray(deltas, dtype=np.float64)
    if steps.size == 0 or steps.size != deltas.size:
        raise ValueError("need matching non-empty step and delta arrays")
    if np.any(steps < 16):
        raise ValueError("lil_tracker requires checkpoints >= 16")
    ratios = deltas / lil_envelope(steps, q)
    return np.maximum.accumulate(ratios)


def mean_with_ci(values, confidence: float = 0.95) -> tuple[float, float]:
    """Sample mean and normal-approximation half-width (population-SD convention)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        raise ValueError("need at least two observations")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    z = special.ndtri(0.5 + confidence / 2.0)
    return float(arr.mean()), float(z * arr.std() / math.sqrt(arr.size))


@dataclass
class TestReport:
    """Outcome of one verification experiment."""

    __test__ = False  # not a pytest class, despite the name

    name: str
    statistic: float
    reference: str
    threshold: float
    verdict: str
    p_value: float | None = None
    n: int | None = None
    replicas: int | None = None
    seed: int | None = None
    params: dict = field(default_factory=dict)
    note: str | None = None

    @classmethod
    def from_rule(cls, name, statistic, reference, threshold, passed, **kw):
        return cls(
            name=name,
            statistic=float(statistic),
            reference=reference,
            threshold=float(threshold),
            verdict="pass" if passed else "fail",
            **kw,
        )

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "reference": self.reference,
            "p_value": self.p_value,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "n": self.n,
            "replicas": self.replicas,
            "seed": self.seed,
            "params": self.params,
            "note": self.note,
        }


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)


def render_table(reports) -> str:
    """Human-readable fixed-width summary, one row per report."""
    lines = [f"{'name':<28} {'statistic':>12} {'threshold':>10} {'p_value':>10} verdict"]
    for r in reports:
        p = f"{r.p_value:.4g}" if r.p_value is not None else "-"
        lines.append(
            f"{r.name:<28} {r.statistic:>12.6g} {r.threshold:>10.4g} {p:>10} {r.verdict}"
        )
    return "\n".join(lines)
