"""Closed-form constants, densities and transforms used as reference laws.

Pure functions of the model parameters; every statistical experiment in the
package tests simulation output against something defined here.  Geometric
variables follow the support convention {1, 2, ...} with
``P(k) = (1 - a)**(k-1) * a`` throughout the package; off-by-one mistakes in
that convention are the main hazard in this model's arithmetic, so the
convention is fixed here once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special


def _check_p(p: float) -> None:
    if not 0.5 < p < 1.0:
        raise ValueError(f"birth probability p must satisfy 1/2 < p < 1, got {p}")


def critical_fitness(p: float) -> float:
    """Threshold at which the below-threshold population is null-recurrent: (1-p)/p."""
    _check_p(p)
    return (1.0 - p) / p


def expected_mu(p: float, f: float) -> float:
    """Mean number of deaths during one zero-holding period of the L process.

    Unique solution of the one-step conditioning equation
    ``mu = q(1 + mu) + p(1-f) mu``, i.e. q/(pf).  Equals 1 at the critical
    threshold.
    """
    _check_p(p)
    if not 0.0 < f <= 1.0:
        raise ValueError(f"threshold f must lie in (0, 1], got {f}")
    q = 1.0 - p
    return q / (p * f)


def correction_moments(p: float) -> tuple[float, float]:
    """(exact mean, a-priori bound) for the total deaths attempted on an empty population.

    The count equals ``sum_{i<=g} (h_i - 1)`` with g ~ Geom(1 - f_c) visits of
    the population size to zero and h_i ~ Geom(p) holding times there, giving
    mean q/(2p-1); the cruder product bound E(g) E(h) = 1/(2p-1) is returned
    alongside.
    """
    _check_p(p)
    q = 1.0 - p
    return q / (2.0 * p - 1.0), 1.0 / (2.0 * p - 1.0)


# ---------------------------------------------------------------------------
# one-sided stable law of index 1/2
# ---------------------------------------------------------------------------


def stable_pdf(u, c: float = 1.0):
    """Density ``c * exp(-c^2 / 2u) / sqrt(2 pi u^3)`` on u > 0, else 0."""
    if c <= 0:
        raise ValueError(f"scale c must be positive, got {c}")
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    pos = u > 0
    up = u[pos]
    out[pos] = c * np.exp(-c * c / (2.0 * up)) / np.sqrt(2.0 * np.pi * up**3)
    return out if out.ndim else float(out)


def stable_cdf(t, c: float = 1.0):
    """Distribution function of the index-1/2 stable law: erfc(c / sqrt(2t))."""
    if c <= 0:
        raise ValueError(f"scale c must be positive, got {c}")
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = special.erfc(c / np.sqrt(2.0 * t[pos]))
    return out if out.ndim else float(out)


def stable_laplace(theta: float, c: float = 1.0) -> float:
    """Laplace transform ``exp(-c sqrt(2 theta))`` of the index-1/2 stable law."""
    if c <= 0:
        raise ValueError(f"scale c must be positive, got {c}")
    if theta < 0:
        raise ValueError(f"theta must be non-negative, got {theta}")
    return math.exp(-c * math.sqrt(2.0 * theta))


def half_normal_cdf(x, sigma: float = 1.0):
    """CDF of |N(0, sigma^2)|: erf(x / (sigma sqrt(2))) on x >= 0, else 0."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = special.erf(x[pos] / (sigma * math.sqrt(2.0)))
    return out if out.ndim else float(out)


def half_normal_mean(sigma: float = 1.0) -> float:
    """Mean of |N(0, sigma^2)|: sigma * sqrt(2/pi)."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return sigma * math.sqrt(2.0 / math.pi)


# ---------------------------------------------------------------------------
# iterated-logarithm scalings
# ---------------------------------------------------------------------------


def lil_envelope(n, q: float):
    """Normalizer ``sqrt(4 q n ln ln n)`` for the death-surplus growth band."""
    if not 0.0 < q < 0.5:
        raise ValueError(f"death probability q must lie in (0, 1/2), got {q}")
    n_arr = np.asarray(n, dtype=np.float64)
    if np.any(n_arr < 16):
        raise ValueError("lil_envelope requires n >= 16")
    out = np.sqrt(4.0 * q * n_arr * np.log(np.log(n_arr)))
    return out if out.ndim else float(out)


def lil_phi(x) -> float:
    """Classical scaling ``sqrt(2 x ln ln x)``; rejects inputs with ln ln x <= 0."""
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(x_arr <= math.e):
        raise ValueError("lil_phi requires ln ln x > 0, i.e. x > e")
    out = np.sqrt(2.0 * x_arr * np.log(np.log(x_arr)))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# law objects
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeometricLaw:
    """Geometric distribution on {1, 2, ...} with success probability ``a``."""

    a: float

    def __post_init__(self):
        if not 0.0 < self.a <= 1.0:
            raise ValueError(f"success probability must lie in (0, 1], got {self.a}")

    @property
    def mean(self) -> float:
        return 1.0 / self.a

    def pmf(self, k):
        k = np.asarray(k)
        out = np.where(k >= 1, (1.0 - self.a) ** (k - 1) * self.a, 0.0)
        return out if out.ndim else float(out)

    def cdf(self, k):
        k = np.asarray(k)
        out = np.where(k >= 1, 1.0 - (1.0 - self.a) ** np.floor(k), 0.0)
        return out if out.ndim else float(out)

    def inv_cdf(self, u: float) -> int:
        """Smallest k with cdf(k) >= u; monotone in u (used for coupling draws)."""
        if not 0.0 <= u < 1.0:
            raise ValueError(f"u must lie in [0, 1), got {u}")
        if self.a == 1.0 or u == 0.0:
            return 1
        return max(1, math.ceil(math.log1p(-u) / math.log1p(-self.a)))


@dataclass(frozen=True)
class StableHalfLaw:
    """One-sided stable law of index 1/2 with scale parameter ``c``."""

    c: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError(f"scale c must be positive, got {self.c}")

    def pdf(self, u):
        return stable_pdf(u, self.c)

    def cdf(self, t):
        return stable_cdf(t, self.c)

    def laplace(self, theta: float) -> float:
        return stable_laplace(theta, self.c)


@dataclass(frozen=True)
class HalfNormalLaw:
    """Law of |N(0, sigma^2)|."""

    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def mean(self) -> float:
        return half_normal_mean(self.sigma)

    def cdf(self, x):
        return half_normal_cdf(x, self.sigma)


# ---------------------------------------------------------------------------
# long-run behaviour of the below-threshold population size
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StationaryLawL:
    """Long-run classification of the below-threshold population size L.

    ``regime`` is one of ``positive-recurrent`` (geometric stationary law with
    ratio ``rho = p f / q``), ``null-recurrent`` or ``transient`` (linear
    drift ``p f - q``).
    """

    regime: str
    rho: float | None = None
    drift: float | None = None

    def pmf(self, k):
        if self.regime != "positive-recurrent":
            raise ValueError(f"no stationary law in the {self.regime} regime")
        k = np.asarray(k)
        out = np.where(k >= 0, (1.0 - self.rho) * self.rho ** np.maximum(k, 0), 0.0)
        return out if out.ndim else float(out)


def stationary_law_L(p: float, f: float) -> StationaryLawL:
    """Classify L and return its stationary law when one exists.

    Criticality is decided by comparing ``f`` against ``(1-p)/p`` directly
    (not ``p*f`` against ``q``), so a threshold produced by
    ``critical_fitness`` classifies as critical bit for bit.
    """
    _check_p(p)
    if not 0.0 < f <= 1.0:
        raise ValueError(f"threshold f must lie in (0, 1], got {f}")
    q = 1.0 - p
    f_c = q / p
    if f < f_c:
        return StationaryLawL("positive-recurrent", rho=p * f / q)
    if f == f_c:
        return StationaryLawL("null-recurrent")
    return StationaryLawL("transient", drift=p * f - q)
