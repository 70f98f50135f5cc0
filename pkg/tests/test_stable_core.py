"""Characteristic function, inversion pdf/cdf and the interpolation table."""
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special, stats

from stablefit.errors import DomainError
from stablefit.stable_core import (StableParams, StableTable, WavenumberGrid, cdf, cf, pdf,
                                   tail_asymptote_constant)

alphas = st.floats(0.3, 2.0)
betas = st.floats(-1.0, 1.0)
gammas = st.floats(0.1, 10.0)
deltas = st.floats(-10.0, 10.0)
ks = st.floats(-50.0, 50.0)


@st.composite
def params(draw, alpha=alphas):
    return StableParams(draw(alpha), draw(betas), draw(gammas), draw(deltas))


class TestParams:
    @pytest.mark.parametrize("bad", [dict(alpha=0), dict(alpha=2.1), dict(alpha=1, beta=1.5),
                                     dict(alpha=1, gamma=0), dict(alpha=1, delta=math.inf)])
    def test_rejects_invalid(self, bad):
        with pytest.raises(DomainError):
            StableParams(**bad)

    def test_replace(self):
        p = StableParams(1.5, 0.2, 2, 1).replace(beta=-0.3)
        assert p.as_tuple() == (1.5, -0.3, 2.0, 1.0)


class TestGrid:
    def test_regression_default(self):
        g = WavenumberGrid.regression()
        assert g.points.size == 81
        assert g.points[0] == 0.2 and g.points[-1] == 1.0
        assert g.spacing == 0.01

    def test_distance_default(self):
        g = WavenumberGrid.distance()
        assert g.points.size == 100
        assert g.points[0] == -math.pi and g.points[-1] == math.pi
        assert g.spacing == pytest.approx(2 * math.pi / 100)
        np.testing.assert_array_equal(g.points, -g.points[::-1])

    @pytest.mark.parametrize("pts,dk", [([0, 1, 3], 1.0), ([1, 0], 1.0), ([0, 1, 2], 0.0), ([0], 1.0)])
    def test_invalid(self, pts, dk):
        with pytest.raises(DomainError):
            WavenumberGrid(np.array(pts, float), dk)


class TestCF:
    def test_gaussian(self):
        assert cf(StableParams(2), 1.0) == pytest.approx(math.exp(-1), abs=1e-15)
        assert cf(StableParams(2), 1.0).imag == pytest.approx(0, abs=1e-16)

    def test_cauchy(self):
        assert cf(StableParams(1), -2.0) == pytest.approx(math.exp(-2), abs=1e-15)

    def test_zero_is_exact(self):
        for a in (0.5, 1.0, 1.5, 2.0):
            assert cf(StableParams(a, 0.7, 3, 2), 0.0) == 1.0
        assert cf(StableParams(1, 0.5), np.array([0.0]))[0] == 1.0

    @pytest.mark.parametrize("p,k", [((1.5, 0.5, 2, 1), 0.7), ((1.0, -0.6, 1.7, 0.3), 2.5),
                                     ((0.6, 1.0, 0.4, -2.0), -3.1)])
    def test_high_precision(self, p, k):
        mpmath.mp.dps = 40
        a, b, g, d = (mpmath.mpf(v) for v in p)
        kk = mpmath.mpf(k)
        sg = mpmath.sign(kk)
        om = mpmath.tan(mpmath.pi * a / 2) if p[0] != 1 else -2 / mpmath.pi * mpmath.log(abs(kk))
        ref = mpmath.exp(1j * d * kk - g ** a * abs(kk) ** a * (1 - 1j * b * sg * om))
        got = cf(StableParams(*p), k)
        assert abs(got - complex(ref)) < 1e-14

    @given(params(), ks)
    def test_hermitian(self, p, k):
        assert cf(p, -k) == pytest.approx(np.conj(cf(p, k)), abs=1e-13)

    @given(params(), ks)
    def test_bounded(self, p, k):
        assert abs(cf(p, k)) <= 1 + 1e-15

    @given(params(alpha=st.floats(0.3, 2.0).filter(lambda a: abs(a - 1) > 1e-3)), ks)
    def test_location_scale_action(self, p, k):
        base = StableParams(p.alpha, p.beta)
        shifted = np.exp(1j * p.delta * k) * cf(p.replace(delta=0.0), k)
        assert cf(p, k) == pytest.approx(shifted, abs=1e-12)
        assert cf(p.replace(delta=0.0), k) == pytest.approx(cf(base, p.gamma * k), abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.7, 1.3, 1.9])
    def test_convolution_stability(self, alpha):
        k = WavenumberGrid.distance().points
        lhs = cf(StableParams(alpha), k) ** 2
        rhs = cf(StableParams(alpha, 0, 2 ** (1 / alpha)), k)
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)


class TestPdf:
    def test_closed_forms(self):
        assert pdf(StableParams(1), 0.0) == pytest.approx(1 / math.pi, abs=1e-10)
        assert pdf(StableParams(2), 0.0) == pytest.approx(1 / (2 * math.sqrt(math.pi)), abs=1e-10)

    @pytest.mark.parametrize("x", [-7.0, -1.0, 0.3, 2.0, 25.0])
    def test_cauchy_and_gaussian_curves(self, x):
        assert pdf(StableParams(1, 0, 2, 1), x) == pytest.approx(stats.cauchy(1, 2).pdf(x), rel=1e-7)
        assert pdf(StableParams(2, 0, 1.5, -1), x) == pytest.approx(
            stats.norm(-1, 1.5 * math.sqrt(2)).pdf(x), rel=1e-7, abs=1e-14)

    @pytest.mark.parametrize("x", [0.05, 0.4, 1.0, 3.0, 40.0])
    def test_levy(self, x):
        # S(1/2, 1, c, 0) is the Levy law with scale c
        c = 0.8
        assert pdf(StableParams(0.5, 1, c, 0), x) == pytest.approx(stats.levy(0, c).pdf(x), rel=1e-6)
        assert cdf(StableParams(0.5, 1, c, 0), x) == pytest.approx(stats.levy(0, c).cdf(x), abs=1e-8)

    def test_brute_force_trapezoid(self):
        p = StableParams(1.4)
        k = np.linspace(0, 60, 600_001)
        ref = np.trapezoid((cf(p, k) * np.exp(-3j * k)).real, k) / math.pi
        assert pdf(p, 3.0) == pytest.approx(ref, rel=1e-8)

    @pytest.mark.parametrize("p", [(1.3, 0.4, 1, 0), (0.8, -0.5, 2, 1), (1.9, -1, 1, 0), (1.0, 0.7, 1, 0)])
    def test_against_scipy_body(self, p):
        # scipy's S1 parameterization matches; compare in the body only
        x = np.array([-2.5, -1.0, 0.7, 1.9, 4.0]) * p[2] + p[3]
        ref = stats.levy_stable(p[0], p[1], loc=p[3], scale=p[2]).pdf(x)
        np.testing.assert_allclose(pdf(StableParams(*p), x), ref, rtol=2e-4)

    @given(params(alpha=st.floats(0.6, 2.0)), st.floats(0.0, 20.0))
    @settings(max_examples=30, deadline=None)
    def test_symmetry(self, p, u):
        p = p.replace(beta=0.0)
        assert pdf(p, p.delta + u) == pytest.approx(pdf(p, p.delta - u), abs=1e-8)

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    @pytest.mark.parametrize("p", [(1.4, 0.3, 1, 0), (0.9, -0.6, 1, 0), (1.0, 0.5, 1, 0)])
    def test_integrates_to_one(self, p):
        sp = StableParams(*p)
        total = sum(integrate.quad(lambda x: pdf(sp, x), a, b, limit=200)[0]
                    for a, b in [(-np.inf, -20), (-20, 0), (0, 20), (20, np.inf)])
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_tail_asymptote(self):
        p = StableParams(1.5, 0.4)
        x = 1e4
        c = tail_asymptote_constant(p)
        assert pdf(p, x) == pytest.approx(p.alpha * c * x ** (-p.alpha - 1), rel=1e-3)
        assert 1 - cdf(p, x) == pytest.approx(c * x ** (-p.alpha), rel=1e-3)


class TestCdf:
    def test_closed_forms(self):
        assert cdf(StableParams(1), 1.0) == pytest.approx(0.75, abs=1e-10)
        assert cdf(StableParams(2), 0.0) == 0.5
        assert cdf(StableParams(1.3, 0, 2, 5), 5.0) == 0.5

    def test_against_pdf_integral(self):
        p = StableParams(1.4, 0.3)
        ref = integrate.quad(lambda x: pdf(p, x), -np.inf, -10)[0] + \
            integrate.quad(lambda x: pdf(p, x), -10, 2, limit=200)[0]
        assert cdf(p, 2.0) == pytest.approx(ref, abs=1e-8)

    @pytest.mark.parametrize("p", [(1.4, 0.3, 1, 0), (0.7, -0.5, 1, 0), (1.9, 0.9, 2, -1)])
    def test_running_integral_of_pdf(self, p):
        sp = StableParams(*p)
        probes = np.linspace(-8, 8, 100) * sp.gamma + sp.delta
        F = cdf(sp, probes)
        steps = np.array([integrate.quad(lambda x: pdf(sp, x), a, b)[0] for a, b in zip(probes[:-1], probes[1:])])
        np.testing.assert_allclose(np.diff(F), steps, atol=1e-6)
        assert np.all(np.diff(F) >= 0)

    def test_limits(self):
        p = StableParams(1.2, 0.5)
        assert cdf(p, -1e8) < 1e-8
        assert cdf(p, 1e8) > 1 - 1e-8

    def test_far_tail_matches_asymptote(self):
        p = StableParams(0.8, 0.0)
        x = -1e6
        assert cdf(p, x) == pytest.approx(tail_asymptote_constant(p) * abs(x) ** -0.8, rel=1e-3)


class TestTailConstant:
    def test_values(self):
        assert tail_asymptote_constant(StableParams(1)) == pytest.approx(1 / math.pi)
        ref = special.gamma(1.5) * math.sin(0.75 * math.pi) * 2 / math.pi
        assert tail_asymptote_constant(StableParams(1.5, 1)) == pytest.approx(ref, rel=1e-14)
        assert ref == pytest.approx(0.39894, abs=1e-5)
        assert tail_asymptote_constant(StableParams(1.5, -1)) == 0

    def test_gaussian_rejected(self):
        with pytest.raises(DomainError):
            tail_asymptote_constant(StableParams(2))


class TestTable:
    @pytest.mark.parametrize("p", [(1.4, 0.0, 1, 0), (0.8, 0.5, 2, 1), (1.9, -0.5, 1, 0)])
    def test_matches_direct(self, p):
        sp = StableParams(*p)
        table = StableTable(sp)
        x = np.r_[np.linspace(-30, 30, 37), [-300, 500]] * sp.gamma + sp.delta
        direct_pdf, direct_cdf = pdf(sp, x), cdf(sp, x)
        np.testing.assert_allclose(table.pdf(x), direct_pdf, rtol=2e-3)
        np.testing.assert_allclose(table.cdf(x), direct_cdf, atol=1e-5)
        np.testing.assert_allclose(table.sf(x), 1 - direct_cdf, atol=1e-5)

    def test_power_law_continuation(self):
        sp = StableParams(1.5, 0.3)
        table = StableTable(sp, span=1e3)
        x = 1e5
        c = tail_asymptote_constant(sp)
        assert table.sf(x) == pytest.approx(c * x ** -1.5, rel=1e-2)
        assert table.pdf(x) == pytest.approx(1.5 * c * x ** -2.5, rel=1e-2)

    def test_gaussian_closed_form(self):
        table = StableTable(StableParams(2, 0, 1.5, 1))
        ref = stats.norm(1, 1.5 * math.sqrt(2))
        x = np.array([-40.0, 0.0, 3.0, 60.0])
        np.testing.assert_allclose(table.logpdf(x), ref.logpdf(x))
        np.testing.assert_allclose(table.logsf(x), ref.logsf(x))
