"""Thermal chain against hand-computed oracles and analytic identities.

Frozen literals below were computed independently from the closed-form
expressions (exp(15000/383 - 15000/(theta+273)), 55*((K^2 R + 1)/(R + 1))^n,
25*K^(2m), first-order lag), not by running the module.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridlife.thermal import (
    GRADIENT_FLOOR,
    DegenerateLoadingError,
    IntervalLoading,
    TransformerThermalParams,
    aging_acceleration,
    horizon_loss_of_life,
    interval_loss_of_life,
    loss_gradient,
    steady_rises,
    transient_rise,
)

P = TransformerThermalParams()


def test_aging_reference_point_is_exact():
    assert aging_acceleration(110.0) == 1.0


def test_aging_factor_values():
    assert aging_acceleration(120.0) == pytest.approx(2.7089251438281656, rel=1e-12)
    assert aging_acceleration(80.0) == pytest.approx(0.03584945245027534, rel=1e-12)


def test_aging_rejects_absolute_zero():
    with pytest.raises(ValueError):
        aging_acceleration(-273.0)


def test_steady_rises_at_rated_load():
    assert steady_rises(1.0, P) == (55.0, 25.0)


def test_steady_rises_off_rated():
    oil, hot = steady_rises(1.2, P)
    assert oil == pytest.approx(69.3121963894756, rel=1e-12)
    assert hot == pytest.approx(33.46801865189482, rel=1e-12)
    oil, hot = steady_rises(0.5, P)
    assert oil == pytest.approx(27.924233524210035, rel=1e-12)
    assert hot == pytest.approx(8.246924442330588, rel=1e-12)


def test_transient_first_order_lag():
    assert transient_rise(30.0, 70.0, 3.5, 1.0) == pytest.approx(
        39.94090827698856, rel=1e-12)
    # Degenerate cases: no step, and an instantaneous (tiny tau) step.
    assert transient_rise(40.0, 40.0, 3.5, 1.0) == 40.0
    assert transient_rise(0.0, 50.0, 1e-9, 1.0) == pytest.approx(50.0)


def test_rated_interval_consumes_nominal_life():
    res = interval_loss_of_life(IntervalLoading(1.0, 1.0, 30.0), P)
    assert res.hotspot_temp == pytest.approx(110.0, abs=1e-12)
    assert res.aging_factor == pytest.approx(1.0, rel=1e-12)
    assert res.lol_percent == pytest.approx(100.0 / 180000.0, rel=1e-12)


def test_hot_ambient_interval():
    res = interval_loss_of_life(IntervalLoading(1.0, 1.0, 40.0), P)
    assert res.lol_percent == pytest.approx(0.0015049584132378697, rel=1e-12)


def test_mixed_transient_interval():
    res = interval_loss_of_life(IntervalLoading(0.4, 1.3, 25.0), P)
    assert res.top_oil_rise == pytest.approx(37.41735846125364, rel=1e-12)
    assert res.hotspot_rise == pytest.approx(38.04057909344061, rel=1e-12)
    assert res.hotspot_temp == pytest.approx(100.45793755469425, rel=1e-12)
    assert res.lol_percent == pytest.approx(0.00020423956138545892, rel=1e-12)


def test_exponent_validation():
    with pytest.raises(ValueError):
        TransformerThermalParams(exponent_m=0.5)
    with pytest.raises(ValueError):
        TransformerThermalParams(exponent_n=1.1)
    with pytest.raises(ValueError):
        IntervalLoading(-0.1, 1.0, 30.0)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(200):
        ki = rng.uniform(0.05, 1.6)
        ku = rng.uniform(0.05, 1.6)
        amb = rng.uniform(-10.0, 45.0)
        g = loss_gradient(IntervalLoading(ki, ku, amb), P)
        h = 1e-6
        for attr, lo, hi in (
            ("d_lol_d_k_initial",
             IntervalLoading(ki - h, ku, amb), IntervalLoading(ki + h, ku, amb)),
            ("d_lol_d_k_ultimate",
             IntervalLoading(ki, ku - h, amb), IntervalLoading(ki, ku + h, amb)),
        ):
            fd = (interval_loss_of_life(hi, P).lol_percent
                  - interval_loss_of_life(lo, P).lol_percent) / (2.0 * h)
            rel = abs(getattr(g, attr) - fd) / max(1e-12, abs(fd))
            worst = max(worst, rel)
    assert worst <= 1e-6


def test_gradient_floor_raises():
    with pytest.raises(DegenerateLoadingError):
        loss_gradient(IntervalLoading(GRADIENT_FLOOR / 2, 1.0, 30.0), P)
    with pytest.raises(DegenerateLoadingError):
        loss_gradient(IntervalLoading(1.0, 0.0, 30.0), P)


def test_constant_rated_year():
    lol, life = horizon_loss_of_life(
        np.full(8760, 10.0), np.full(8760, 30.0), P)
    assert lol == pytest.approx(8760.0 * 100.0 / 180000.0, rel=1e-9)
    assert life == pytest.approx(20.547945205479454, rel=1e-9)


def test_horizon_rejects_bad_series():
    with pytest.raises(ValueError):
        horizon_loss_of_life([], [], P)
    with pytest.raises(ValueError):
        horizon_loss_of_life([1.0, 2.0], [30.0], P)
    with pytest.raises(ValueError):
        horizon_loss_of_life([-1.0], [30.0], P)


def test_horizon_additivity_with_carried_loading():
    rng = np.random.default_rng(7)
    mw = rng.uniform(0.0, 14.0, 48)
    amb = rng.uniform(15.0, 40.0, 48)
    whole, _ = horizon_loss_of_life(mw, amb, P)
    for cut in (1, 17, 24, 47):
        head, _ = horizon_loss_of_life(mw[:cut], amb[:cut], P)
        tail, _ = horizon_loss_of_life(mw[cut:], amb[cut:], P,
                                       initial_loading=mw[cut - 1])
        assert head + tail == pytest.approx(whole, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(k=st.floats(0.01, 1.6), amb=st.floats(-20.0, 45.0),
       step=st.floats(0.01, 0.4))
def test_lol_monotone_in_ultimate_loading(k, amb, step):
    lo = interval_loss_of_life(IntervalLoading(k, k, amb), P)
    hi = interval_loss_of_life(IntervalLoading(k, k + step, amb), P)
    assert hi.lol_percent > lo.lol_percent


@settings(max_examples=60, deadline=None)
@given(k=st.floats(0.01, 1.6), amb=st.floats(-20.0, 40.0),
       step=st.floats(0.5, 10.0))
def test_lol_monotone_in_ambient(k, amb, step):
    lo = interval_loss_of_life(IntervalLoading(k, k, amb), P)
    hi = interval_loss_of_life(IntervalLoading(k, k, amb + step), P)
    assert hi.lol_percent > lo.lol_percent


@settings(max_examples=40, deadline=None)
@given(ki=st.floats(0.01, 1.5), ku=st.floats(0.01, 1.5),
       amb=st.floats(-10.0, 45.0))
def test_tangent_underestimates_elsewhere(ki, ku, amb):
    """Interval lol is convex in (k_init, k_ult): tangents are global
    under-estimators. This is what makes aggregated Benders cuts safe."""
    anchor = IntervalLoading(0.8, 0.9, amb)
    base = interval_loss_of_life(anchor, P).lol_percent
    g = loss_gradient(anchor, P)
    predicted = (base + g.d_lol_d_k_initial * (ki - anchor.k_initial)
                 + g.d_lol_d_k_ultimate * (ku - anchor.k_ultimate))
    actual = interval_loss_of_life(IntervalLoading(ki, ku, amb), P).lol_percent
    assert actual >= predicted - 1e-12 * max(1.0, abs(actual))
