import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from drivestyle.errors import WindowTooLong, WrongKind
from drivestyle.rules import (
    DANGEROUS_G,
    G0,
    VERY_SAFE_G,
    Severity,
    classify_braking,
    max_window_swing,
    severity_for,
)
from drivestyle.sensor import Label

from conftest import make_segment

THETA_VS = VERY_SAFE_G * G0
THETA_D = DANGEROUS_G * G0


def brake(ax, kind="brake", t0=0.0):
    return make_segment(len(ax), kind=kind, t0=t0, ax=ax)


def step(height, n=120, at=60):
    return np.r_[np.zeros(at), np.full(n - at, -height)]


def test_thresholds_in_g():
    assert G0 == 9.80665
    assert THETA_VS == pytest.approx(1.0787315)
    assert THETA_D == pytest.approx(4.4129925)


def test_smooth_ramp_is_very_safe():
    ax = -np.clip((np.arange(120) - 30) / 60, 0, 1) * 0.9
    v = classify_braking(brake(ax))
    assert v.delta_a == pytest.approx(0.9)
    assert v.severity is Severity.VERY_SAFE and v.label is Label.SAFE


def test_middle_band_is_safe():
    v = classify_braking(brake(step(3.0)))
    assert v.delta_a == pytest.approx(3.0)
    assert v.severity is Severity.SAFE and v.label is Label.SAFE


def test_large_step_is_dangerous():
    v = classify_braking(brake(step(5.0)))
    assert v.severity is Severity.DANGEROUS and v.label is Label.DANGEROUS
    assert v.window[1] - v.window[0] == pytest.approx(3.0)


def test_exact_boundaries():
    assert classify_braking(brake(step(THETA_D))).severity is Severity.SAFE
    assert classify_braking(brake(step(THETA_VS))).severity is Severity.VERY_SAFE
    assert severity_for(THETA_D) is Severity.SAFE
    assert severity_for(np.nextafter(THETA_D, np.inf)) is Severity.DANGEROUS
    assert severity_for(THETA_VS) is Severity.VERY_SAFE
    assert severity_for(np.nextafter(THETA_VS, np.inf)) is Severity.SAFE


def test_window_is_three_seconds():
    # a slow 6 m/s^2 ramp over 12 s changes by only 1.5 m/s^2 inside any 3 s window
    ax = -np.linspace(0, 6.0, 241)
    v = classify_braking(brake(ax))
    assert v.delta_a == pytest.approx(1.5, abs=1e-9)
    assert v.severity is Severity.SAFE


def test_gas_uses_same_rule():
    assert classify_braking(brake(-step(5.0), kind="gas")).severity is Severity.DANGEROUS


def test_errors():
    with pytest.raises(WrongKind):
        classify_braking(make_segment(80, kind="turn"))
    with pytest.raises(WindowTooLong):
        classify_braking(brake(np.zeros(50)))
    with pytest.raises(ValueError):
        classify_braking(brake(np.zeros(80)), theta_vs=5.0, theta_d=1.0)


def test_exactly_window_length_is_accepted():
    v = classify_braking(brake(step(2.0, n=61, at=30)))
    assert v.delta_a == pytest.approx(2.0)


def test_swing_brute_force():
    rng = np.random.default_rng(0)
    t = np.arange(100) / 20
    a = rng.normal(size=100)
    got, _, _ = max_window_swing(t, a, 1.0)
    want = max(np.ptp(a[i:i + 21]) for i in range(80))
    assert got == pytest.approx(want)


@given(st.integers(0, 10_000), st.floats(1.0, 10.0))
def test_scaling_never_lowers_severity(seed, alpha):
    rng = np.random.default_rng(seed)
    ax = np.cumsum(rng.normal(0, 0.3, 100))
    order = {Severity.VERY_SAFE: 0, Severity.SAFE: 1, Severity.DANGEROUS: 2}
    base = classify_braking(brake(ax))
    scaled = classify_braking(brake(alpha * ax))
    assert order[scaled.severity] >= order[base.severity]


@given(st.integers(0, 10_000), st.floats(-1e3, 1e3))
def test_time_shift_invariance(seed, dt):
    ax = np.cumsum(np.random.default_rng(seed).normal(0, 0.3, 100))
    a = classify_braking(brake(ax))
    b = classify_braking(brake(ax, t0=dt))
    assert a.severity is b.severity
    assert a.delta_a == b.delta_a
