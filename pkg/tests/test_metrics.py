import json

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from elmpi.exceptions import DataError
from elmpi.metrics import (
    IntervalForecast,
    ObjectiveWeights,
    PiConfig,
    SharpnessWeights,
    aace,
    evaluate,
    format_pinc,
    min_max_normalize,
    mpil,
    objective,
    outside_stats,
    picp,
    report_row,
    sharpness_mean,
    sharpness_point,
)

from oracles import all_metrics, picp_loop

PI90 = PiConfig.from_pinc(0.90)


def fc(lower, upper, actual, pi=PI90):
    return IntervalForecast(lower, upper, actual, pi)


def test_pi_config():
    pi = PiConfig(0.05)
    assert pi.pinc == pytest.approx(0.95)
    with pytest.raises(ValueError):
        PiConfig(0.0)
    with pytest.raises(ValueError):
        PiConfig(1.0)


def test_weight_validation():
    with pytest.raises(ValueError):
        SharpnessWeights(0.0, 0.1)
    with pytest.raises(ValueError):
        SharpnessWeights(1.0, -0.1)
    with pytest.raises(ValueError):
        ObjectiveWeights(0.0, 0.0)


def test_forecast_rejects_crossed_bounds():
    with pytest.raises(DataError, match="index 1"):
        fc([0, 5, 0], [1, 4, 1], [0, 0, 0])


def test_picp_all_inside():
    assert picp(fc([0, 0], [2, 2], [1, 2])) == 1.0


def test_picp_271_of_300():
    actual = np.zeros(300)
    lower = np.where(np.arange(300) < 271, -1.0, 1.0)
    f = fc(lower, lower + 2.0, actual)
    assert picp(f) == pytest.approx(271 / 300)
    assert round(100 * picp(f), 2) == 90.33


def test_picp_boolean_loop(rng):
    lo = rng.normal(size=20)
    hi = lo + rng.uniform(0, 1, 20)
    y = rng.normal(size=20)
    y[:3] = lo[:3]  # boundary hits count as covered
    f = fc(lo, hi, y)
    assert picp(f) * 20 == picp_loop(lo, hi, y) * 20


def test_picp_empty():
    with pytest.raises(DataError):
        picp(fc([], [], []))


@pytest.mark.parametrize("p, pinc, expect", [
    (0.87, 0.90, 0.030),
    (0.95, 0.95, 0.0),
    (0.5, 0.5, 0.0),
])
def test_aace(p, pinc, expect):
    assert aace(p, pinc) == pytest.approx(expect, abs=1e-15)


def test_sharpness_point_branches():
    w = SharpnessWeights(11, 0.1)
    assert sharpness_point(100, 140, 120, 0.05, w) == pytest.approx(22.0)
    assert sharpness_point(100, 140, 95, 0.05, w) == pytest.approx(22.5)
    assert sharpness_point(100, 140, 150, 0.05, w) == pytest.approx(23.0)
    assert sharpness_point(7, 7, 7, 0.05, w) == 0.0
    with pytest.raises(DataError):
        sharpness_point(2, 1, 1, 0.05, w)


def test_min_max_normalize():
    np.testing.assert_allclose(min_max_normalize([2, 4, 6]), [0, 0.5, 1])
    np.testing.assert_array_equal(min_max_normalize([3, 3, 3]), 0.0)
    np.testing.assert_array_equal(min_max_normalize([9.0]), [0.0])
    with pytest.raises(DataError):
        min_max_normalize([])


def test_sharpness_mean_constant_is_zero():
    f = fc([1, 1, 1], [3, 3, 3], [2, 2, 2])
    assert sharpness_mean(f, SharpnessWeights(6)) == 0.0


def test_sharpness_mean_two_points():
    # alpha 0.1, w1 1: widths 100 and 300 give pointwise 10 and 30
    f = fc([0, 0], [100, 300], [50, 50])
    assert sharpness_mean(f, SharpnessWeights(1.0, 0.1)) == pytest.approx(0.5)


def test_sharpness_mean_loop_oracle(rng):
    lo = rng.uniform(0, 100, 10)
    hi = lo + rng.uniform(0, 50, 10)
    y = rng.uniform(-20, 180, 10)
    pi = PiConfig(0.05)
    f = fc(lo, hi, y, pi)
    want = all_metrics(lo, hi, y, 0.05, 11, 0.1, 1, 1)[2]
    assert sharpness_mean(f, SharpnessWeights(11, 0.1)) == pytest.approx(want, abs=1e-12)


def test_objective():
    ow = ObjectiveWeights(1, 1)
    assert objective(0.003, 0.180, ow) == pytest.approx(0.183)
    assert objective(0.0, 0.0, ow) == 0.0
    assert objective(0.04, 0.9, ObjectiveWeights(1, 0)) == pytest.approx(0.04)


def test_mpil():
    assert mpil(fc([0, 5], [10, 15], [1, 6])) == 10
    assert mpil(fc([0, 0, 0], [10, 20, 30], [1, 1, 1])) == 20
    assert mpil(fc([4, 4], [4, 4], [1, 9])) == 0


def test_outside_stats():
    s = outside_stats(fc([0, 0], [1, 1], [0.5, 1]))
    assert (s.above_count, s.below_count) == (0, 0)
    assert (s.above_mean_dist, s.below_mean_dist) == (0.0, 0.0)
    s = outside_stats(fc([0, 0, 0], [10, 10, 10], [20, 5, 5]))
    assert (s.above_count, s.above_mean_dist) == (1, 10.0)
    s = outside_stats(fc([50, 50, 0], [60, 60, 1], [30, 20, 0.5]))
    assert (s.below_count, s.below_mean_dist) == (2, 25.0)


def test_evaluate_exact_coverage():
    actual = np.arange(20, dtype=float)
    lower = actual - 1
    lower[0] = 5  # one miss out of 20: picp 0.95
    f = fc(lower, np.maximum(lower, actual + 1), actual, PiConfig.from_pinc(0.95))
    ev = evaluate(f, SharpnessWeights(11))
    assert ev.picp == 0.95
    assert ev.aace == pytest.approx(0.0, abs=1e-15)


def test_evaluate_five_point_fixture():
    lower = [90.0, 100.0, 120.0, 80.0, 100.0]
    upper = [110.0, 130.0, 125.0, 100.0, 100.0]
    actual = [100.0, 135.0, 118.0, 80.0, 100.0]
    pi = PiConfig(0.1)
    w, ow = SharpnessWeights(6, 0.1), ObjectiveWeights(1, 1)
    ev = evaluate(fc(lower, upper, actual, pi), w, ow)
    # by hand: pointwise 12, 18.5, 3.2, 12, 0 -> normalized mean 2.55 / 3.7 / 5
    assert ev.picp == pytest.approx(0.6, abs=1e-12)
    assert ev.aace == pytest.approx(0.3, abs=1e-9)
    assert ev.sharpness_norm_mean == pytest.approx((12 + 18.5 + 3.2 + 12) / 18.5 / 5, abs=1e-9)
    assert ev.objective == pytest.approx(ev.aace + ev.sharpness_norm_mean, abs=1e-12)
    assert ev.mpil == pytest.approx(15.0, abs=1e-9)
    got = (ev.picp, ev.aace, ev.sharpness_norm_mean, ev.objective, ev.mpil)
    np.testing.assert_allclose(got, all_metrics(lower, upper, actual, 0.1, 6, 0.1, 1, 1), atol=1e-9)


def test_evaluation_json():
    ev = evaluate(fc([0, 0], [1, 2], [0.5, 3]), SharpnessWeights(6))
    d = json.loads(ev.to_json())
    assert set(d) == {"pinc", "picp", "aace", "sharpness_norm_mean", "objective", "mpil"}


@pytest.mark.parametrize("rel, sharp, obj", [
    (0.003, 0.180, 0.183),
    (0.060, 0.264, 0.324),
    (0.017, 0.043, 0.060),
])
def test_report_identity_on_reference_rows(rel, sharp, obj):
    from elmpi.metrics import Evaluation
    ev = Evaluation(0.9, 0.9, rel, sharp, rel + sharp, 10.0)
    row = report_row("M", ev, digits=3)
    assert row[2:5] == [f"{rel:.3f}", f"{sharp:.3f}", f"{obj:.3f}"]


def test_format_pinc():
    assert [format_pinc(p) for p in (0.9, 0.95, 0.99, 0.975)] == ["90", "95", "99", "97.5"]


finite = st.floats(-1e4, 1e4, allow_nan=False)


@st.composite
def forecasts(draw, n_min=1):
    n = draw(st.integers(n_min, 25))
    lo = np.array(draw(st.lists(finite, min_size=n, max_size=n)))
    width = np.array(draw(st.lists(st.floats(0, 1e3), min_size=n, max_size=n)))
    y = np.array(draw(st.lists(finite, min_size=n, max_size=n)))
    alpha = draw(st.floats(0.01, 0.5))
    return lo, lo + width, y, alpha


@settings(max_examples=100, deadline=None)
@given(forecasts(), st.floats(0.01, 100), st.floats(-1e3, 1e3))
def test_picp_affine_invariant(fx, scale, shift):
    lo, hi, y, alpha = fx
    pi = PiConfig(alpha)
    a = picp(fc(lo, hi, y, pi))
    lo2, hi2, y2 = lo * scale + shift, hi * scale + shift, y * scale + shift
    # skip cases where rounding moves a point across a bound
    assume(np.array_equal((lo <= y) & (y <= hi), (lo2 <= y2) & (y2 <= hi2)))
    assert picp(fc(lo2, hi2, y2, pi)) == a


@settings(max_examples=100, deadline=None)
@given(st.floats(-100, 100), st.floats(0, 50), st.floats(0.01, 0.5),
       st.floats(0.1, 20), st.floats(0, 5))
def test_sharpness_continuous_and_monotone(lo, width, alpha, w1, w2):
    w = SharpnessWeights(w1, w2)
    hi = lo + width
    eps = 1e-7
    base = w1 * alpha * width
    for bound in (lo, hi):
        assert sharpness_point(lo, hi, bound, alpha, w) == pytest.approx(base, abs=1e-9)
    assert abs(sharpness_point(lo, hi, hi + eps, alpha, w) - base) <= w2 * eps + 1e-9
    assert abs(sharpness_point(lo, hi, lo - eps, alpha, w) - base) <= w2 * eps + 1e-9
    above = [sharpness_point(lo, hi, hi + d, alpha, w) for d in (0.0, 1.0, 5.0, 50.0)]
    below = [sharpness_point(lo, hi, lo - d, alpha, w) for d in (0.0, 1.0, 5.0, 50.0)]
    assert above == sorted(above)
    assert below == sorted(below)


@settings(max_examples=100, deadline=None)
@given(forecasts())
def test_mpil_nonnegative(fx):
    lo, hi, y, alpha = fx
    m = mpil(fc(lo, hi, y, PiConfig(alpha)))
    assert m >= 0
    assert (m == 0) == bool(np.all(hi == lo))


@settings(max_examples=100, deadline=None)
@given(forecasts(), st.floats(0, 10), st.floats(0.1, 10))
def test_evaluate_identities(fx, gamma, lam):
    lo, hi, y, alpha = fx
    ow = ObjectiveWeights(gamma, lam)
    ev = evaluate(fc(lo, hi, y, PiConfig(alpha)), SharpnessWeights(6), ow)
    assert ev.aace == abs(ev.picp - ev.pinc)
    assert ev.objective == pytest.approx(gamma * ev.aace + lam * ev.sharpness_norm_mean, abs=1e-12)
    assert 0 <= ev.picp <= 1
    assert 0 <= ev.sharpness_norm_mean <= 1
    row = report_row("M", ev, ow)
    assert float(row[4]) == pytest.approx(gamma * float(row[2]) + lam * float(row[3]), abs=1e-6)
