"""Chambers-Mallows-Stuck draws: determinism, moments, quartiles, CF agreement."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from stablefit.cf_estimation import EmpiricalCF
from stablefit.errors import DomainError
from stablefit.sampler import (SamplerConfig, make_rng, sample, sample_series, sample_standard,
                               sample_standard_array)
from stablefit.stable_core import StableParams, StableTable, WavenumberGrid, cf


def test_single_draw_consumes_one_pair():
    a, b = make_rng(5), make_rng(5)
    x = [sample_standard(1.4, 0.3, a) for _ in range(4)]
    np.testing.assert_array_equal(x, sample_standard_array(1.4, 0.3, b, 4))
    assert a.random() == b.random()


def test_determinism():
    cfg = SamplerConfig(StableParams(1.3), seed=42, count=5)
    np.testing.assert_array_equal(sample_series(cfg), sample_series(cfg))
    assert len(sample_series(cfg)) == 5


def test_keyed_streams_differ():
    assert make_rng(1, 0).random() != make_rng(1, 1).random()
    assert make_rng(1, 3).random() == make_rng(1, 3).random()


@pytest.mark.parametrize("cfg", [dict(count=0, seed=1), dict(count=1, seed=-1), dict(count=1, seed=2 ** 64)])
def test_config_validation(cfg):
    with pytest.raises(DomainError):
        SamplerConfig(StableParams(1.5), **cfg)


def test_invalid_params():
    with pytest.raises(DomainError):
        sample_standard(2.5, 0, make_rng(0))


def test_gaussian_moments():
    x = sample_standard_array(2.0, 0.0, make_rng(11), 10 ** 6)
    assert abs(x.mean()) < 0.01
    assert x.var() == pytest.approx(2.0, abs=0.05)


def test_scaled_gaussian_variance():
    x = sample_series(SamplerConfig(StableParams(2, 0, 3, 1), seed=12, count=10 ** 6))
    assert x.var() == pytest.approx(18.0, abs=0.5)


def test_cauchy_quartiles():
    x = sample_standard_array(1.0, 0.0, make_rng(13), 10 ** 6)
    q1, med, q3 = np.percentile(x, [25, 50, 75])
    assert abs(med) < 0.01
    assert q3 - q1 == pytest.approx(2.0, abs=0.02)


def test_beta_irrelevant_at_two():
    a = sample_standard_array(2.0, 0.0, make_rng(14), 1000)
    b = sample_standard_array(2.0, 1.0, make_rng(14), 1000)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


def test_skew_direction():
    x = sample(StableParams(1.5, 1.0), 10 ** 5, make_rng(15))
    p1, p99 = np.percentile(x, [1, 99])
    assert abs(p99) > abs(p1)


def test_ks_against_cdf():
    p = StableParams(1.4)
    x = sample(p, 10 ** 5, make_rng(16))
    assert stats.kstest(x, StableTable(p).cdf).pvalue > 0.01


@pytest.mark.parametrize("alpha", [0.8, 1.0, 1.4, 1.9])
def test_ecf_matches_cf(alpha):
    p = StableParams(alpha, 0.3 if alpha != 1.9 else 0.0)
    k = WavenumberGrid.regression().points
    x = sample(p, 10 ** 5, make_rng(17, int(alpha * 10)))
    assert np.max(np.abs(EmpiricalCF(x)(k) - cf(p, k))) < 0.02


def test_alpha_one_scale_correction():
    p = StableParams(1.0, 0.5, 3.0, 1.0)
    k = WavenumberGrid.regression().points
    x = sample(p, 2 * 10 ** 5, make_rng(18))
    assert np.max(np.abs(EmpiricalCF(x)(k) - cf(p, k))) < 0.015


@given(st.floats(0.2, 2.0), st.floats(-1, 1), st.integers(0, 2 ** 32))
@settings(max_examples=50, deadline=None)
def test_draws_never_nan(alpha, beta, seed):
    # tiny alpha can overflow to +-inf, but never produce nan
    x = sample_standard_array(alpha, beta, make_rng(seed), 200)
    assert not np.any(np.isnan(x))
