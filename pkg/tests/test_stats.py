import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from multipath_aoi.latency import DistributionCurve
from multipath_aoi.stats import empirical_cdf, invert_cdf, ks_distance, percentile


def test_empirical_cdf_steps():
    e = empirical_cdf([3.0, 1.0, 2.0, 2.0])
    assert e.count == 4
    assert np.array_equal(e.samples, [1, 2, 2, 3])
    assert e.cdf(0.5) == 0.0
    assert e.cdf(2.0) == 0.75
    assert list(e.cdf([1.0, 2.5, 9.0])) == [0.25, 0.75, 1.0]
    assert e.mean() == 2.0
    with pytest.raises(ValueError):
        e.samples[0] = 5.0


def test_empirical_rejects_bad_input():
    with pytest.raises(ValueError):
        empirical_cdf([])
    with pytest.raises(ValueError):
        empirical_cdf([1.0, np.nan])


def test_percentile_is_order_statistic():
    e = empirical_cdf(np.arange(1, 101, dtype=float))
    assert percentile(e, 0.99) == 99.0
    assert percentile(e, 0.995) == 100.0
    assert percentile(e, 0.001) == 1.0
    assert e.percentile(0.5) == 50.0
    with pytest.raises(ValueError):
        percentile(e, 1.0)
    with pytest.raises(TypeError):
        percentile(object(), 0.5)


def test_analytic_percentile_bisection():
    c = DistributionCurve((1.0,), (2.0,))
    assert percentile(c, 0.5) == pytest.approx(np.log(2) / 2, abs=1e-9)
    # a tiny scale forces many bracket doublings
    assert invert_cdf(c.cdf, 0.999, scale=1e-6) == pytest.approx(-np.log(0.001) / 2, abs=1e-9)
    with pytest.raises(ValueError):
        invert_cdf(c.cdf, 0.0)
    with pytest.raises(ArithmeticError):
        invert_cdf(lambda t: 0.0 * t, 0.5)


@pytest.mark.parametrize("n,seed", [(10, 0), (1000, 1), (50000, 2)])
def test_ks_matches_scipy(n, seed):
    x = np.random.default_rng(seed).exponential(1.3, n)
    ours = ks_distance(empirical_cdf(x), sps.expon(scale=1.2).cdf)
    ref = sps.kstest(x, sps.expon(scale=1.2).cdf).statistic
    assert ours == pytest.approx(ref, abs=1e-12)


def test_ks_with_ties():
    x = np.array([1.0, 1.0, 1.0, 2.0])
    # reference cdf is 0.5 at 1 and 1 at 2: gaps 0.5 before 1, 0.25 at 1
    ks = ks_distance(x, lambda t: np.interp(t, [0, 1, 2], [0, 0.5, 1.0]))
    assert ks == pytest.approx(0.5)


@given(st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=200))
def test_ks_is_a_distance_in_unit_interval(xs):
    d = ks_distance(empirical_cdf(xs), lambda t: np.clip(np.asarray(t) / 100.0, 0, 1))
    assert 0.0 <= d <= 1.0
