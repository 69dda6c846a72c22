"""Closed-form reference laws against independent quadrature and matrix oracles."""

import math

import numpy as np
import pytest
from scipy import integrate

from fitwalk import analytic

# frozen oracle values (high-precision evaluation of the defining formulas)
STABLE_PDF_1_1 = 0.241970724519
STABLE_CDF_1_1 = 0.317310507863
LAPLACE_1_1 = 0.243116734434
LAPLACE_1_C08 = 0.205740661084  # c = 1/sqrt(0.8), theta = 1
HALF_NORMAL_MEAN = 0.797884560803
HALF_NORMAL_CDF_1 = 0.682689492137
LIL_ENV_16_04 = 5.10944271695


def transformed_stable_quad(c, lo, hi):
    """Integral of the stable density via the substitution u = c^2 / (2v),
    which maps the essential singularity at 0+ to exponential decay."""

    def g(v):
        u = c * c / (2.0 * v)
        return analytic.stable_pdf(u, c) * c * c / (2.0 * v * v)

    # u in (lo, hi) maps to v in (c^2/2hi, c^2/2lo), reversed orientation
    v_lo = c * c / (2.0 * hi) if hi != math.inf else 0.0
    v_hi = c * c / (2.0 * lo) if lo > 0 else math.inf
    val, err = integrate.quad(g, v_lo, v_hi, limit=400, epsabs=1e-10)
    assert err < 1e-7  # conservative estimate; the value comparisons pin 1e-8
    return val


class TestCriticalFitness:
    def test_examples(self):
        assert analytic.critical_fitness(0.6) == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert analytic.critical_fitness(0.75) == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert analytic.critical_fitness(0.99) == pytest.approx(1.0 / 99.0, rel=1e-12)

    @pytest.mark.parametrize("p", [0.5, 1.0, 0.2, 1.3])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            analytic.critical_fitness(p)


class TestExpectedMu:
    def test_critical_gives_one(self):
        for p in (0.55, 0.6, 0.75, 0.9):
            assert analytic.expected_mu(p, analytic.critical_fitness(p)) == pytest.approx(
                1.0, rel=1e-12
            )

    def test_examples(self):
        assert analytic.expected_mu(0.6, 1.0) == pytest.approx(2.0 / 3.0, rel=1e-12)
        assert analytic.expected_mu(0.75, 1.0 / 3.0) == pytest.approx(1.0, rel=1e-12)

    def test_first_step_equation_residual(self):
        for p in (0.51, 0.6, 0.75, 0.95):
            q = 1.0 - p
            for f in (0.1, 0.3, analytic.critical_fitness(p), 0.9, 1.0):
                mu = analytic.expected_mu(p, f)
                residual = mu - (q * (1.0 + mu) + p * (1.0 - f) * mu)
                assert abs(residual) < 1e-12


class TestCorrectionMoments:
    def test_example(self):
        exact, bound = analytic.correction_moments(0.75)
        assert exact == pytest.approx(0.5, rel=1e-15)
        assert bound == pytest.approx(2.0, rel=1e-15)

    def test_vanishes_as_p_to_one(self):
        exact, _ = analytic.correction_moments(0.999)
        assert exact < 0.01


class TestStableLaw:
    def test_pdf_cdf_frozen_values(self):
        assert analytic.stable_pdf(1.0, 1.0) == pytest.approx(STABLE_PDF_1_1, abs=1e-10)
        assert analytic.stable_cdf(1.0, 1.0) == pytest.approx(STABLE_CDF_1_1, abs=1e-10)

    def test_edges(self):
        assert analytic.stable_cdf(0.0, 1.0) == 0.0
        assert analytic.stable_cdf(-3.0, 1.0) == 0.0
        assert analytic.stable_pdf(0.0, 1.0) == 0.0
        assert analytic.stable_pdf(-1.0, 1.0) == 0.0
        assert analytic.stable_cdf(1e12, 1.0) == pytest.approx(1.0, abs=1e-5)

    @pytest.mark.parametrize("c", [0.5, 1.0, 1.0 / math.sqrt(0.8), 2.0])
    def test_density_normalizes(self, c):
        assert transformed_stable_quad(c, 0.0, math.inf) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 5.0, 50.0])
    def test_cdf_matches_quadrature(self, t):
        for c in (0.5, 1.0, 2.0):
            assert analytic.stable_cdf(t, c) == pytest.approx(
                transformed_stable_quad(c, 0.0, t), abs=1e-8
            )

    def test_laplace_frozen_values(self):
        assert analytic.stable_laplace(0.0, 1.0) == 1.0
        assert analytic.stable_laplace(1.0, 1.0) == pytest.approx(LAPLACE_1_1, abs=1e-10)
        assert analytic.stable_laplace(1.0, 1.0 / math.sqrt(0.8)) == pytest.approx(
            LAPLACE_1_C08, abs=1e-10
        )

    @pytest.mark.parametrize("theta", [0.1, 1.0, 10.0])
    def test_laplace_matches_quadrature(self, theta):
        def integrand(u):
            return math.exp(-theta * u) * analytic.stable_pdf(u, 1.0)

        val, _ = integrate.quad(integrand, 0.0, math.inf, limit=400, epsabs=1e-10)
        assert analytic.stable_laplace(theta, 1.0) == pytest.approx(val, abs=1e-6)

    def test_cdf_monotone(self):
        grid = np.linspace(0.0, 40.0, 400)
        vals = analytic.stable_cdf(grid, 1.0)
        assert np.all(np.diff(vals) >= 0)
        assert np.all((vals >= 0) & (vals <= 1))

    def test_domain(self):
        with pytest.raises(ValueError):
            analytic.stable_laplace(-1.0, 1.0)
        with pytest.raises(ValueError):
            analytic.stable_cdf(1.0, 0.0)


class TestHalfNormal:
    def test_frozen_values(self):
        assert analytic.half_normal_cdf(0.0, 1.0) == 0.0
        assert analytic.half_normal_mean(1.0) == pytest.approx(HALF_NORMAL_MEAN, abs=1e-10)
        assert analytic.half_normal_cdf(1.0, 1.0) == pytest.approx(
            HALF_NORMAL_CDF_1, abs=1e-10
        )

    def test_mean_matches_quadrature(self):
        for sigma in (0.5, 1.0, math.sqrt(0.8)):
            val, _ = integrate.quad(
                lambda x: x
                * math.sqrt(2.0 / math.pi)
                / sigma
                * math.exp(-(x * x) / (2 * sigma * sigma)),
                0,
                math.inf,
            )
            assert analytic.half_normal_mean(sigma) == pytest.approx(val, abs=1e-9)

    def test_cdf_matches_quadrature(self):
        val, _ = integrate.quad(
            lambda x: math.sqrt(2.0 / math.pi) * math.exp(-x * x / 2.0), 0.0, 1.0
        )
        assert analytic.half_normal_cdf(1.0, 1.0) == pytest.approx(val, abs=1e-9)

    def test_law_object(self):
        law = analytic.HalfNormalLaw(sigma=2.0)
        assert law.mean == pytest.approx(2.0 * HALF_NORMAL_MEAN, abs=1e-9)
        assert law.cdf(2.0) == pytest.approx(HALF_NORMAL_CDF_1, abs=1e-10)


class TestLilScalings:
    def test_envelope_frozen_value(self):
        assert analytic.lil_envelope(16, 0.4) == pytest.approx(LIL_ENV_16_04, abs=1e-9)

    def test_envelope_increasing(self):
        grid = np.arange(16, 10_000, 7)
        vals = analytic.lil_envelope(grid, 0.4)
        assert np.all(np.diff(vals) > 0)

    def test_envelope_domain(self):
        with pytest.raises(ValueError):
            analytic.lil_envelope(15, 0.4)

    def test_phi_domain(self):
        with pytest.raises(ValueError):
            analytic.lil_phi(math.e)
        with pytest.raises(ValueError):
            analytic.lil_phi(1.0)
        x = math.exp(math.e)
        assert analytic.lil_phi(x) == pytest.approx(math.sqrt(2.0 * x), rel=1e-12)


class TestGeometricLaw:
    def test_moments_and_pmf(self):
        law = analytic.GeometricLaw(0.4)
        ks = np.arange(1, 200)
        assert law.pmf(ks).sum() == pytest.approx(1.0, abs=1e-12)
        assert (law.pmf(ks) * ks).sum() == pytest.approx(law.mean, abs=1e-9)
        assert law.pmf(0) == 0.0

    def test_inv_cdf_round_trip(self):
        law = analytic.GeometricLaw(0.3)
        for k in (1, 2, 5, 20):
            lo = law.cdf(k - 1)
            hi = law.cdf(k)
            assert law.inv_cdf(lo) == k
            assert law.inv_cdf((lo + hi) / 2.0) == k

    def test_inverse_cdf_coupling_monotone_in_rate(self):
        # the coupled replacement draw can never exceed the original
        slow = analytic.GeometricLaw(0.4)
        fast = analytic.GeometricLaw(0.8)
        for u in np.linspace(0.0, 0.999999, 400):
            assert fast.inv_cdf(u) <= slow.inv_cdf(u)


class TestStationaryLaw:
    def _power_iteration(self, p, f, size=200, tol=1e-12):
        q = 1.0 - p
        P = np.zeros((size, size))
        P[0, 1] = p * f
        P[0, 0] = 1.0 - p * f
        for i in range(1, size - 1):
            P[i, i + 1] = p * f
            P[i, i - 1] = q
            P[i, i] = 1.0 - p * f - q
        P[size - 1, size - 2] = q
        P[size - 1, size - 1] = 1.0 - q
        v = np.full(size, 1.0 / size)
        for _ in range(200_000):
            nxt = v @ P
            if np.abs(nxt - v).sum() < tol:
                return nxt
            v = nxt
        raise AssertionError("power iteration did not converge")

    def test_example_rho(self):
        law = analytic.stationary_law_L(0.6, 1.0 / 3.0)
        assert law.regime == "positive-recurrent"
        assert law.rho == pytest.approx(0.5, rel=1e-12)
        assert law.pmf(0) == pytest.approx(0.5, rel=1e-12)

    @pytest.mark.parametrize("p,f", [(0.6, 1.0 / 3.0), (0.75, 0.2), (0.55, 0.3)])
    def test_matches_power_iteration(self, p, f):
        law = analytic.stationary_law_L(p, f)
        pi = self._power_iteration(p, f)
        model = law.pmf(np.arange(len(pi)))
        tv = 0.5 * np.abs(model - pi).sum()
        assert tv < 1e-8

    def test_critical_and_transient_flags(self):
        crit = analytic.stationary_law_L(0.6, analytic.critical_fitness(0.6))
        assert crit.regime == "null-recurrent"
        trans = analytic.stationary_law_L(0.6, 0.9)
        assert trans.regime == "transient"
        assert trans.drift == pytest.approx(0.14, abs=1e-12)
        with pytest.raises(ValueError):
            trans.pmf(0)

    def test_f_equal_one_is_transient(self):
        assert analytic.stationary_law_L(0.6, 1.0).regime == "transient"
