import json
from decimal import Decimal
from fractions import Fraction

import pytest
from flint import arb
from hypothesis import given, settings, strategies as st

from nkit.certified import CertifiedValue, render_digits, working_precision


@given(st.integers(-10**30, 10**30), st.integers(1, 10**20), st.integers(40, 400))
@settings(max_examples=200, deadline=None)
def test_freezing_keeps_the_enclosure(num, den, prec):
    with working_precision(prec):
        x = (arb(num) / den).log() if num > 0 else arb(num) / den
        c = CertifiedValue.from_arb(x)
        b = c.ball()
        assert b.contains(x)


@given(st.integers(-10**12, 10**12), st.integers(1, 10**6))
def test_json_round_trip(num, den):
    with working_precision(128):
        c = CertifiedValue.from_arb(arb(num) / den)
    s = json.dumps(c.to_json())
    assert CertifiedValue.from_json(json.loads(s)) == c
    assert json.dumps(CertifiedValue.from_json(json.loads(s)).to_json()) == s


def test_exact_values_have_zero_radius():
    c = CertifiedValue.exact(Fraction(3, 8))
    assert c.rad == 0 and c.mid == Decimal("0.375")
    assert c.contains(Fraction(3, 8))
    third = CertifiedValue.exact(Fraction(1, 3))
    assert third.rad > 0 and third.contains(Fraction(1, 3))


def test_non_rigorous_flag_serialized():
    c = CertifiedValue(Decimal("1.5"), Decimal("0.01"), rigorous=False)
    assert c.to_json() == {"mid": "1.5", "rad": "0.01", "rigorous": False}
    assert not CertifiedValue.from_json(c.to_json()).rigorous


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        CertifiedValue(Decimal(1), Decimal(-1))


def test_render_keeps_justified_digits():
    assert render_digits(Decimal("4.619162314"), Decimal("3e-9")) == "4.619162314"
    assert render_digits(Decimal("4.619162314"), Decimal("2e-3")) == "4.619"
    assert render_digits(Decimal("7"), Decimal("0")) == "7"


def test_overlaps():
    a = CertifiedValue(Decimal("1.0"), Decimal("0.1"))
    b = CertifiedValue(Decimal("1.15"), Decimal("0.1"))
    c = CertifiedValue(Decimal("2"), Decimal("0.1"))
    assert a.overlaps(b) and not a.overlaps(c)


def test_endpoints_are_exact_for_long_midpoints():
    v = CertifiedValue.from_arb(arb(2).log(), rigorous=True)
    assert len(str(v.mid)) > 30
    assert Fraction(v.lower) == Fraction(v.mid) - Fraction(v.rad)
    assert Fraction(v.upper) == Fraction(v.mid) + Fraction(v.rad)
