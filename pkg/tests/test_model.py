import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from multipath_aoi.model import (PathParams, Quality, Scheme, SystemConfig, UnstableSystemError, arrival_rate,
                                 assert_stable, check_quality, decodes_on_first, packet_size, path_load,
                                 require_stable)

ALL = [Scheme.alternating(), Scheme.replicated(), Scheme.split(), Scheme.coded(0.75), Scheme.queue_based()]


def test_packet_sizes():
    assert packet_size(Scheme.alternating()) == 1.0
    assert packet_size(Scheme.replicated()) == 1.0
    assert packet_size(Scheme.split()) == 0.5
    assert packet_size(Scheme.coded(0.75)) == pytest.approx(2 / 3, rel=1e-15)
    assert packet_size(Scheme.queue_based()) == 1.0
    assert packet_size(Scheme.coded(0.5)) == packet_size(Scheme.replicated())
    assert packet_size(Scheme.coded(1.0)) == packet_size(Scheme.split())


def test_arrival_rates():
    assert arrival_rate(Scheme.alternating(), 1.0) == 0.5
    assert arrival_rate(Scheme.replicated(), 2.0) == 0.5
    assert arrival_rate(Scheme.coded(0.9), 0.75) == pytest.approx(4 / 3)
    assert arrival_rate(Scheme.queue_based(), 1.0) == 0.5
    with pytest.raises(ValueError):
        arrival_rate(Scheme.split(), 0.0)


def test_path_loads():
    assert path_load(SystemConfig.make(Scheme.alternating(), 1.0), 1) == 0.5
    assert path_load(SystemConfig.make(Scheme.replicated(), 0.75), 2) == pytest.approx(4 / 3)
    assert path_load(SystemConfig.make(Scheme.coded(0.75), 1.5), 1) == pytest.approx(4 / 9)
    assert path_load(SystemConfig.make(Scheme.split(), 1.0, mu=(1, 2)), 2) == 0.25
    with pytest.raises(ValueError):
        path_load(SystemConfig.make(Scheme.split(), 1.0), 3)


def test_stability_reports():
    ok = assert_stable(SystemConfig.make(Scheme.replicated(), 1.5))
    assert ok and ok.loads == pytest.approx((2 / 3, 2 / 3))
    bad = assert_stable(SystemConfig.make(Scheme.replicated(), 0.75))
    assert not bad
    assert bad.unstable_paths == (1, 2)
    assert "rho=1.33333" in str(bad)
    assert assert_stable(SystemConfig.make(Scheme.split(), 0.75))
    one = assert_stable(SystemConfig.make(Scheme.replicated(), 1.2, mu=(0.8, 2.0)))
    assert one.unstable_paths == (1,)
    with pytest.raises(UnstableSystemError) as err:
        require_stable(SystemConfig.make(Scheme.replicated(), 0.75))
    assert err.value.report.unstable_paths == (1, 2)


def test_load_of_exactly_one_is_unstable():
    cfg = SystemConfig.make(Scheme.coded(2 / 3), 0.75)
    assert path_load(cfg, 1) == 1.0
    assert not assert_stable(cfg)


def test_validation():
    with pytest.raises(ValueError):
        PathParams(0.0)
    with pytest.raises(ValueError):
        PathParams(1.0, 1.0)
    with pytest.raises(ValueError):
        PathParams(1.0, -0.1)
    with pytest.raises(ValueError):
        Scheme.coded(0.4)
    with pytest.raises(ValueError):
        Scheme.coded(1.01)
    with pytest.raises(ValueError):
        Scheme("split", 0.7)
    with pytest.raises(ValueError):
        SystemConfig.make(Scheme.split(), -1.0)
    with pytest.raises(ValueError):
        SystemConfig(Scheme.split(), 1.0, (PathParams(1.0),))
    with pytest.raises(TypeError):
        SystemConfig.make(Scheme.split(), 1.0).replace(nope=1)


def test_scheme_parse_and_labels():
    assert Scheme.parse("Queue-Based") == Scheme.queue_based()
    assert Scheme.parse("coded", 0.75).label == "coded(0.75)"
    assert Scheme.parse("split", 0.75) == Scheme.split()
    with pytest.raises(ValueError):
        Scheme.parse("carrier-pigeon")


def test_qualities():
    assert check_quality(Scheme.split()) is Quality.WHOLE
    assert check_quality(Scheme.coded(0.6)) is Quality.LQ
    assert check_quality(Scheme.coded(0.6), "hq") is Quality.HQ
    with pytest.raises(ValueError):
        check_quality(Scheme.split(), "lq")
    with pytest.raises(ValueError):
        check_quality(Scheme.coded(0.6), "whole")
    assert decodes_on_first(Scheme.replicated(), Quality.WHOLE)
    assert not decodes_on_first(Scheme.split(), Quality.WHOLE)
    assert decodes_on_first(Scheme.coded(0.5), Quality.HQ)
    assert not decodes_on_first(Scheme.coded(0.51), Quality.HQ)


taus = st.floats(0.05, 50, allow_nan=False)
mus = st.floats(0.05, 20, allow_nan=False)


@given(st.sampled_from(ALL), taus, taus, mus)
def test_load_decreases_with_tau(scheme, t1, t2, mu):
    lo, hi = sorted((t1, t2))
    a = path_load(SystemConfig.make(scheme, lo, (mu, mu)), 1)
    b = path_load(SystemConfig.make(scheme, hi, (mu, mu)), 1)
    assert b <= a


@given(st.sampled_from(ALL), taus, mus, mus)
def test_load_decreases_with_mu(scheme, tau, m1, m2):
    lo, hi = sorted((m1, m2))
    cfg = SystemConfig.make(scheme, tau, (lo, hi))
    assert path_load(cfg, 2) <= path_load(cfg, 1)


@given(st.floats(0.5, 1.0), st.floats(0.5, 1.0), taus)
def test_load_increases_with_packet_size(e1, e2, tau):
    a, b = Scheme.coded(e1), Scheme.coded(e2)
    if packet_size(a) <= packet_size(b):
        assert path_load(SystemConfig.make(a, tau), 1) <= path_load(SystemConfig.make(b, tau), 1)


@given(st.sampled_from(ALL), taus, mus, mus)
def test_stable_iff_both_loads_below_one(scheme, tau, m1, m2):
    cfg = SystemConfig.make(scheme, tau, (m1, m2))
    loads = (path_load(cfg, 1), path_load(cfg, 2))
    assert bool(assert_stable(cfg)) == (loads[0] < 1 and loads[1] < 1)
    assert all(math.isfinite(x) for x in loads)
