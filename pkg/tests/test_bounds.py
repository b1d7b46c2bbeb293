import math

import pytest
from hypothesis import given, settings, strategies as st

from heavytail.bounds import (
    BoundKind,
    centered_abs_bound,
    drift_identity,
    preasymptotic_bound,
    thm1_bound,
    thm2_bound,
    thm3_bound,
    thm4_bound,
    vanishing_term,
)
from heavytail.errors import InvalidInput, InvalidSchedule, WrongRegime
from heavytail.exact_engine import mu_schedule
from heavytail.tail_model import TailClassSpec

ONE = TailClassSpec(1.0, 1.0)
TWO = TailClassSpec(2.0, 1.0, 2.0, 1.0)


def test_thm1_golden():
    ev = thm1_bound(ONE, 10**4, 0.5)
    assert ev.raw_value == pytest.approx((1 + math.e**2) / 100, rel=1e-12)
    assert ev.threshold_x == 1e6 and ev.kind is BoundKind.THM1_RIGHT and not ev.vacuous


def test_thm2_golden():
    # W = 0.5, alpha_l = 0.5, n = 1e4, eps = 0.2: (0.5 + e) 1e4^-0.1
    ev = thm2_bound(TailClassSpec(1.0, 1.0, 0.5, 0.5), 10**4, 0.2)
    assert ev.raw_value == pytest.approx((0.5 + math.e) * 10 ** -0.4, rel=1e-12)
    assert ev.threshold_x == pytest.approx(-(10**4) ** 2.2, rel=1e-12)


def test_thm3_goldens():
    assert thm3_bound(TWO, 10**4, 0.25).raw_value == pytest.approx((1 + math.e**2) / 100, rel=1e-12)
    spec3 = TailClassSpec(3.0, 1.0, 3.0, 1.0)
    expected = 1e6 ** (1 - 1.5 - 0.3) + math.e**2 * 1e6 ** -0.3
    assert thm3_bound(spec3, 10**6, 0.1).raw_value == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.11712449603100915, rel=1e-12)


def test_vacuous_is_clamped():
    ev = thm1_bound(TailClassSpec(0.8, 1.0), 100, 0.1)
    assert ev.vacuous and ev.value == 1.0 and ev.raw_value > 5


def test_centered_abs_is_sum():
    ev = centered_abs_bound(TailClassSpec(2.5, 1.0, 2.5, 1.0), 10**4, 0.3)
    assert ev.raw_value == pytest.approx(0.014978112197861292, rel=1e-12)
    assert ev.raw_value == pytest.approx(
        thm3_bound(TailClassSpec(2.5, 1.0, 2.5, 1.0), 10**4, 0.3).raw_value
        + thm4_bound(TailClassSpec(2.5, 1.0, 2.5, 1.0), 10**4, 0.3).raw_value
    )


@given(st.floats(0.2, 1.0), st.floats(0.05, 1.0), st.floats(0.05, 0.9))
@settings(max_examples=50)
def test_thm1_decreasing_in_n(alpha, v, eps):
    vals = [thm1_bound(TailClassSpec(alpha, v), n, eps).raw_value for n in (10, 100, 1000, 10**4)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("bound", [thm1_bound, thm2_bound, thm3_bound, thm4_bound, centered_abs_bound])
def test_terms_sum_to_raw(bound):
    spec = TailClassSpec(0.7, 0.6, 0.9, 0.4) if bound in (thm1_bound, thm2_bound) else TailClassSpec(1.7, 0.6, 2.4, 0.4)
    ev = bound(spec, 1000, 0.3)
    assert math.fsum(ev.terms.values()) == pytest.approx(ev.raw_value, rel=1e-15)
    js = ev.to_json()
    assert set(js) >= {"kind", "x", "value", "raw", "terms", "vacuous"}


def test_regime_errors():
    with pytest.raises(WrongRegime):
        thm1_bound(TailClassSpec(1.5, 1.0), 100, 0.1)
    with pytest.raises(InvalidInput):
        thm2_bound(ONE, 100, 0.1)
    with pytest.raises(WrongRegime):
        thm2_bound(TailClassSpec(1.0, 1.0, 1.5, 1.0), 100, 0.1)
    with pytest.raises(WrongRegime):
        thm3_bound(TailClassSpec(2.0, 1.0, 1.0, 1.0), 100, 0.1)
    with pytest.raises(InvalidInput):
        thm3_bound(TailClassSpec(2.0, 1.0), 100, 0.1)
    with pytest.raises(InvalidInput):
        thm1_bound(ONE, 0, 0.1)
    with pytest.raises(InvalidInput):
        thm1_bound(ONE, 10, -0.1)


def test_preasymptotic_example():
    ev = preasymptotic_bound(ONE, 10**4, 0.5)
    assert ev.raw_value == pytest.approx(3.93254, rel=1e-5)
    assert ev.details["t0"] == pytest.approx(4.9719e-4, rel=1e-4)
    assert ev.details["exponent"] == pytest.approx(1.3667, rel=1e-4)
    assert ev.terms["union"] == pytest.approx(1e4 * 1e-6)
    assert math.fsum(ev.terms.values()) == ev.raw_value


@pytest.mark.parametrize(
    "spec,side",
    [(ONE, "right"), (TailClassSpec(0.6, 0.5, 0.8, 0.3), "left"), (TWO, "right"), (TWO, "left"), (TWO, "abs")],
)
def test_preasymptotic_at_least_union_term(spec, side):
    for n in (10**3, 10**5, 10**7):
        ev = preasymptotic_bound(spec, n, 0.5, side=side)
        assert ev.raw_value >= ev.terms.get("union", 0) + ev.terms.get("right_union", 0)
        assert math.fsum(ev.terms.values()) == pytest.approx(ev.raw_value, rel=1e-15)


def test_preasymptotic_far_factor_increases_bound():
    a = preasymptotic_bound(ONE, 10**5, 0.5)
    b = preasymptotic_bound(ONE, 10**5, 0.5, far_factor=4.0)
    assert b.raw_value > a.raw_value


def test_preasymptotic_aggregates_lists():
    specs = [TailClassSpec(0.9, 0.5), TailClassSpec(0.7, 1.0)]
    assert preasymptotic_bound(specs, 1000, 0.4).raw_value == preasymptotic_bound(TailClassSpec(0.7, 1.0), 1000, 0.4).raw_value


def test_preasymptotic_errors():
    with pytest.raises(WrongRegime):
        preasymptotic_bound(ONE, 1000, 0.5, schedule=mu_schedule(1000, 0.4, 1.0))
    with pytest.raises(InvalidSchedule):
        preasymptotic_bound(ONE, 1000, 0.5, mu=2.0)
    with pytest.raises(WrongRegime):
        preasymptotic_bound(TailClassSpec(2.0, 1.0), 1000, 0.5)
    with pytest.raises(InvalidInput):
        preasymptotic_bound(ONE, 1000, 0.5, side="left")
    with pytest.raises(InvalidInput):
        preasymptotic_bound(TWO, 1000, 0.5, side="up")


@pytest.mark.parametrize("alpha", [0.3, 0.7, 1.0, 1.3, 2.0])
def test_drift_identity_equality(alpha):
    for n in (100, 10**4, 10**6):
        d = drift_identity(1.0, alpha, n, 0.3)
        assert d.equal


@pytest.mark.parametrize("alpha", [2.5, 3.0, 4.0])
def test_drift_identity_strict_above_two(alpha):
    d = drift_identity(1.0, alpha, 10**4, 0.3)
    assert d.lhs < d.rhs and not d.equal


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0, 3.0])
def test_vanishing_term_decreases(alpha):
    vals = [vanishing_term(alpha, 10**k, 0.5) for k in range(3, 9)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
