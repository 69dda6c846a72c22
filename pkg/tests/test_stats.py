"""KS/chi-square machinery against grid-scan and high-precision oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats as scipy_stats

from fitwalk.stats import (
    EmpiricalSample,
    TestReport,
    chi_square_goodness,
    kolmogorov_sf,
    ks_pvalue,
    ks_statistic,
    lil_tracker,
    mean_with_ci,
    merge_tail_bins,
    reports_to_json,
    two_sample_ks,
)
from fitwalk.analytic import lil_envelope

# frozen oracle values (100-term alternating series / incomplete gamma)
Q_1358 = 0.0500267973344
Q_1628 = 0.00997552243118
CHI2_P_4_1 = 0.0455002638964
CI_HALFWIDTH_01 = 0.692951912175


def grid_scan_ks(values, cdf, lo, hi, points=1_000_001):
    """Brute-force sup over a dense grid, evaluating both one-sided gaps."""
    values = np.sort(values)
    n = len(values)
    grid = np.linspace(lo, hi, points)
    ecdf_right = np.searchsorted(values, grid, side="right") / n
    ecdf_left = np.searchsorted(values, grid, side="left") / n
    f = cdf(grid)
    return max(np.max(np.abs(ecdf_right - f)), np.max(np.abs(f - ecdf_left)))


class TestKsStatistic:
    def test_exact_quantiles(self):
        n = 40
        values = (np.arange(1, n + 1) - 0.5) / n  # F^{-1}((i-1/2)/n) for uniform
        d = ks_statistic(EmpiricalSample.from_values(values), lambda x: x)
        assert d == pytest.approx(1.0 / (2 * n), abs=1e-15)

    def test_single_point(self):
        d = ks_statistic(EmpiricalSample.from_values([0.3]), lambda x: np.asarray(x))
        assert d == pytest.approx(0.7, abs=1e-15)

    def test_against_grid_scan_oracle(self):
        rng = np.random.default_rng(11)
        values = rng.random(10)
        sample = EmpiricalSample.from_values(values)
        d = ks_statistic(sample, lambda x: np.clip(x, 0, 1))
        oracle = grid_scan_ks(values, lambda x: np.clip(x, 0, 1), 0.0, 1.0)
        assert abs(d - oracle) < 1e-6

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            EmpiricalSample.from_values([])

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(0.01, 0.99), min_size=1, max_size=60))
    def test_invariant_under_increasing_transform(self, values):
        sample = EmpiricalSample.from_values(values)
        d1 = ks_statistic(sample, lambda x: np.clip(x, 0, 1))
        transformed = EmpiricalSample.from_values(np.exp(np.asarray(values)))
        d2 = ks_statistic(transformed, lambda y: np.clip(np.log(y), 0, 1))
        assert d1 == pytest.approx(d2, abs=1e-12)
        assert 0.0 <= d1 <= 1.0


class TestKsPvalue:
    def test_frozen_series_values(self):
        assert ks_pvalue(1.358 / math.sqrt(100), 100) == pytest.approx(Q_1358, abs=1e-9)
        assert ks_pvalue(1.628 / math.sqrt(100), 100) == pytest.approx(Q_1628, abs=1e-9)

    def test_degenerate(self):
        assert ks_pvalue(0.0, 50) == 1.0

    def test_monotone_in_d(self):
        ps = [ks_pvalue(d, 200) for d in np.linspace(0.01, 0.3, 30)]
        assert all(a >= b for a, b in zip(ps, ps[1:]))

    def test_against_scipy(self):
        for lam in (0.3, 0.8, 1.0, 1.358, 2.0):
            assert kolmogorov_sf(lam) == pytest.approx(
                float(special.kolmogorov(lam)), abs=1e-10
            )


class TestTwoSampleKs:
    def test_identical(self):
        a = EmpiricalSample.from_values([1.0, 2.0, 3.0])
        assert two_sample_ks(a, a)[0] == 0.0

    def test_disjoint(self):
        a = EmpiricalSample.from_values([1.0, 2.0])
        b = EmpiricalSample.from_values([3.0, 4.0])
        assert two_sample_ks(a, b)[0] == 1.0

    def test_matches_scipy_with_ties(self):
        rng = np.random.default_rng(5)
        a = rng.integers(0, 12, size=300).astype(float)
        b = rng.integers(0, 12, size=211).astype(float)
        d, _ = two_sample_ks(
            EmpiricalSample.from_values(a), EmpiricalSample.from_values(b)
        )
        ref = scipy_stats.ks_2samp(a, b, method="asymp")
        assert d == pytest.approx(ref.statistic, abs=1e-12)

    def test_grid_scan(self):
        rng = np.random.default_rng(6)
        a = np.sort(rng.random(20))
        b = np.sort(rng.random(35))
        d, _ = two_sample_ks(
            EmpiricalSample.from_values(a), EmpiricalSample.from_values(b)
        )
        grid = np.linspace(-0.1, 1.1, 1_000_001)
        fa = np.searchsorted(a, grid, side="right") / len(a)
        fb = np.searchsorted(b, grid, side="right") / len(b)
        assert abs(d - np.max(np.abs(fa - fb))) < 1e-6


class TestChiSquare:
    def test_exact_proportions(self):
        stat, dof, p = chi_square_goodness([50, 30, 20], [0.5, 0.3, 0.2])
        assert stat == 0.0
        assert dof == 2
        assert p == 1.0

    def test_hand_computed_example(self):
        stat, dof, p = chi_square_goodness([60, 40], [0.5, 0.5])
        assert stat == pytest.approx(4.0, abs=1e-12)
        assert dof == 1
        assert p == pytest.approx(CHI2_P_4_1, abs=1e-9)

    def test_degenerate_binning(self):
        with pytest.raises(ValueError):
            chi_square_goodness([100, 1], [0.999, 0.001])
        with pytest.raises(ValueError):
            chi_square_goodness([5], [1.0])

    def test_merge_tail_bins(self):
        counts = [500, 250, 125, 60, 30, 20, 10, 3, 1, 1]
        probs = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125,
                 0.00390625, 0.001953125, 0.001953125]
        mc, mp = merge_tail_bins(counts, probs, min_expected=5.0)
        assert mc.sum() == sum(counts)
        assert mp.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(sum(counts) * mp >= 5.0)
        chi_square_goodness(mc, mp)  # valid binning now


class TestLilTracker:
    def test_zero_path(self):
        steps = np.arange(16, 300)
        running = lil_tracker(steps, np.zeros_like(steps), q=0.4)
        assert np.all(running == 0.0)

    def test_envelope_path_gives_one(self):
        steps = np.arange(16, 500)
        running = lil_tracker(steps, lil_envelope(steps, 0.4), q=0.4)
        assert running[-1] == pytest.approx(1.0, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            lil_tracker([10, 20], [1, 1], q=0.4)
        with pytest.raises(ValueError):
            lil_tracker([], [], q=0.4)


class TestMeanWithCi:
    def test_hand_example(self):
        mean, hw = mean_with_ci([0.0, 1.0], confidence=0.95)
        assert mean == 0.5
        assert hw == pytest.approx(CI_HALFWIDTH_01, abs=1e-9)

    def test_constant_sample(self):
        mean, hw = mean_with_ci([2.0, 2.0, 2.0])
        assert (mean, hw) == (2.0, 0.0)

    def test_lln(self):
        rng = np.random.default_rng(2)
        sample = rng.random(200_000) < 0.2
        mean, hw = mean_with_ci(sample.astype(float))
        assert abs(mean - 0.2) < 3 * hw / 1.96

    def test_domain(self):
        with pytest.raises(ValueError):
            mean_with_ci([1.0])


def test_null_calibration_quick():
    # fuller version (1000 trials, n=1000, level 0.05) runs in the acceptance suite
    rng = np.random.default_rng(8)
    rejections = 0
    trials = 400
    for _ in range(trials):
        sample = EmpiricalSample.from_values(rng.random(500))
        d = ks_statistic(sample, lambda x: np.clip(x, 0, 1))
        if ks_pvalue(d, sample.n) < 0.05:
            rejections += 1
    assert 0.02 <= rejections / trials <= 0.09


def test_report_round_trip():
    report = TestReport.from_rule(
        "demo", 0.5, "reference law", 1.0, True, p_value=0.2, n=10, seed=3,
        params={"p": 0.6},
    )
    assert report.passed
    payload = reports_to_json([report])
    assert '"verdict": "pass"' in payload
    d = report.to_dict()
    assert set(d) >= {"name", "statistic", "p_value", "threshold", "verdict",
                      "n", "replicas", "seed", "params"}
    failing = TestReport.from_rule("demo", 2.0, "ref", 1.0, False)
    assert not failing.passed
