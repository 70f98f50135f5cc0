"""Parseval distance, its 1/N baseline and the N-scaling diagnostic."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stablefit.cf_estimation import EmpiricalCF
from stablefit.errors import GridMismatch
from stablefit.parseval_distance import (distance, distance_report, gaussian_params, ideal_expectation,
                                         scaling_diagnostic)
from stablefit.sampler import make_rng, sample
from stablefit.stable_core import StableParams, WavenumberGrid, cf

GRID = WavenumberGrid.distance()


def test_identity_is_zero():
    p = StableParams(1.3, 0.2, 1.5, 0.3)
    assert distance(lambda k: cf(p, k), p, GRID) <= 1e-15


def test_riemann_sum_by_hand():
    p, q = StableParams(1.3), StableParams(1.7, 0.5)
    k = np.linspace(-math.pi, math.pi, 100)
    ref = sum(abs(cf(q, ki) - cf(p, ki)) ** 2 for ki in k) / 100
    assert distance(lambda kk: cf(q, kk), p, GRID) == pytest.approx(ref, rel=1e-12)


def test_grid_must_cover():
    with pytest.raises(GridMismatch):
        distance(lambda k: k * 0j, StableParams(1.5), WavenumberGrid.regression())


def test_ideal_expectation_gaussian():
    k = np.linspace(-math.pi, math.pi, 100)
    ref = (1 - np.sum(np.exp(-2 * k ** 2)) / 100) / 1000
    assert ideal_expectation(StableParams(2), GRID, 1000) == pytest.approx(ref, rel=1e-13)


def test_ideal_expectation_scaling_exact():
    p = StableParams(1.3)
    e1 = ideal_expectation(p, GRID, 1000)
    assert ideal_expectation(p, GRID, 2000) == e1 / 2
    assert e1 / ideal_expectation(p, GRID, 10000) == pytest.approx(10, rel=1e-15)


def test_ideal_expectation_point_mass_limit():
    assert ideal_expectation(StableParams(1.5, 0, 1e-12), GRID, 10) == pytest.approx(0, abs=1e-15)


def test_gaussian_params():
    g = gaussian_params(StableParams(1.4, 0.5, 2, 1))
    assert g.as_tuple() == (2.0, 0.0, 2.0, 1.0)


def test_report_fields():
    x = sample(StableParams(1.3), 5000, make_rng(1))
    rep = distance_report(EmpiricalCF(x), StableParams(1.3))
    assert rep.sample_size == 5000
    assert rep.ratio_to_ideal == pytest.approx(rep.distance / rep.ideal_expectation)
    assert rep.ideal_expectation > 0


def test_expectation_matches_monte_carlo():
    p = StableParams(1.3)
    d = [distance(EmpiricalCF(sample(p, 1000, make_rng(2, i))), p) for i in range(400)]
    assert np.mean(d) / ideal_expectation(p, GRID, 1000) == pytest.approx(1, abs=0.1)


def test_wrong_alpha_is_farther():
    x = EmpiricalCF(sample(StableParams(1.3), 1000, make_rng(3)))
    assert distance(x, StableParams(1.8)) > distance(x, StableParams(1.3))


class TestScaling:
    sizes = [1000, 3000, 10000, 30000]

    def test_ideal_slope(self):
        p = StableParams(1.3)
        data = [(n, sample(p, n, make_rng(4, n, r))) for n in self.sizes for r in range(40)]
        diag = scaling_diagnostic(data, p)
        assert diag.slope == pytest.approx(-1, abs=0.2)
        assert len(diag.rows()) == 4

    def test_contaminated_slope_is_shallower(self):
        p = StableParams(1.3)
        # a fixed CF-level bias: the data carry a small location shift
        data = [(n, sample(p, n, make_rng(5, n, r)) + 0.05) for n in self.sizes for r in range(40)]
        diag = scaling_diagnostic(data, p)
        assert -1 < diag.slope < 0
        ideal = scaling_diagnostic([(n, sample(p, n, make_rng(5, n, r))) for n in self.sizes for r in range(40)], p)
        assert diag.slope > ideal.slope

    def test_repeated_series_flat(self):
        x = sample(StableParams(1.3), 5000, make_rng(6))
        diag = scaling_diagnostic([(n, x) for n in self.sizes], StableParams(1.3))
        assert diag.slope == pytest.approx(0, abs=1e-12)

    def test_fitted_params(self):
        p = StableParams(1.5)
        data = [(n, sample(p, n, make_rng(7, n))) for n in self.sizes]
        assert np.isfinite(scaling_diagnostic(data).slope)

    def test_needs_three_sizes(self):
        with pytest.raises(ValueError):
            scaling_diagnostic([(10, np.ones(10)), (20, np.ones(20))], StableParams(1.5))


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=40), st.floats(0.3, 2), st.floats(-1, 1))
def test_nonnegative(data, alpha, beta):
    assert distance(EmpiricalCF(data), StableParams(alpha, beta)) >= 0
