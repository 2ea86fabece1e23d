import json
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from nkit.errors import DomainError
from nkit.thresholds import (
    LOG2,
    LogTwoForm,
    ThresholdReport,
    proj_constant,
    threshold_abvar,
    threshold_dyn,
    threshold_main,
    threshold_proj,
)

L2 = math.log(2)


def f(c) -> float:
    return float(c.mid)


def test_proj_examples():
    r = threshold_proj(1, 1, 1)
    mpmath.mp.dps = 50
    oracle = 1 + mpmath.mpf(7) / 2 * mpmath.log(2) + mpmath.mpf(1) / 2 + mpmath.log(2)
    assert abs(f(r.threshold) - float(oracle)) < 1e-15
    assert abs(f(r.threshold) - 4.6192) < 1e-4
    assert abs(f(r.irreducible_variant) - 3.9261) < 1e-4
    shifted = threshold_proj(1, 1, 1, relative_c=2)
    assert shifted.exact - r.exact == LogTwoForm(Fraction(2))
    assert shifted.relative_shift == 2


def test_abvar_examples():
    r = threshold_abvar(1, 16, 1, 0, 3)
    assert abs(f(r.threshold) - (1 + 4 * L2 + 11 / 12)) < 1e-14
    up = threshold_abvar(1, 16, 1, 1, 3)
    assert up.exact - r.exact == LogTwoForm(Fraction(16))
    assert r.exact - r.irreducible_exact == LOG2


def test_dyn_examples():
    r = threshold_dyn(1, 2, 1, 1, 0)
    assert r.exact == LogTwoForm(Fraction(1) + 3 * 4**64 + Fraction(1, 2))
    assert abs(f(r.log10_threshold) - math.log10(3 * 4**64)) < 1e-9
    assert abs(float(r.extras["log10_C2"]["mid"]) - 39.01) < 0.01
    assert r.irreducible_variant is None and r.irreducible_exact is None
    h1 = threshold_dyn(1, 2, 1, 1, 1)
    assert h1.exact - r.exact == LogTwoForm(Fraction(20))


def test_main_examples_and_identity():
    assert threshold_main(2, 1, 3).exact == LogTwoForm(Fraction(8))
    assert threshold_main(1, Fraction(5, 3), 0).exact == LogTwoForm(Fraction(5, 3))
    for n in range(1, 5):
        for d in (1, 3, 7):
            a = threshold_proj(n, d, Fraction(2, 3))
            b = threshold_main(d, Fraction(2, 3), proj_constant(n))
            assert a.exact == b.exact
            assert a.threshold == b.threshold


def test_validation():
    with pytest.raises(DomainError):
        threshold_proj(0, 1, 1)
    with pytest.raises(DomainError):
        threshold_proj(1, 1, 0)
    with pytest.raises(DomainError):
        threshold_abvar(1, 16, 1, -1, 3)
    with pytest.raises(DomainError):
        threshold_dyn(1, 1, 1, 1, 0)
    with pytest.raises(DomainError):
        threshold_main(1, 1, -1)


@pytest.mark.parametrize("rep", [
    threshold_proj(2, 3, Fraction(1, 2), relative_c=Fraction(1, 3)),
    threshold_abvar(2, 5, 1, Fraction(1, 7), 4),
    threshold_dyn(1, 3, 2, 1, Fraction(1, 2)),
    threshold_main(4, 1, proj_constant(2)),
])
def test_json_round_trip(rep):
    s = json.dumps(rep.to_json())
    back = ThresholdReport.from_json(json.loads(s))
    assert back == rep
    assert json.dumps(back.to_json()) == s


@given(st.integers(1, 6), st.integers(1, 20), st.fractions(min_value=Fraction(1, 100), max_value=100, max_denominator=100))
@settings(max_examples=60, deadline=None)
def test_monotone_and_exact_gaps(n, d, C):
    base = threshold_proj(n, d, C)
    assert threshold_proj(n, d + 1, C).threshold.lower > base.threshold.upper
    assert threshold_proj(n, d, C + 1).threshold.lower > base.threshold.upper
    assert threshold_proj(n + 1, d, C).threshold.lower > base.threshold.upper
    assert base.exact - base.irreducible_exact == LOG2.scale(d)
    ab = threshold_abvar(1, d, C, 0, n)
    assert ab.exact - ab.irreducible_exact == LOG2.scale(Fraction(d, 16))


def test_precision_doubling_agrees():
    r = threshold_proj(3, 5, Fraction(7, 3), prec=64)
    s = threshold_proj(3, 5, Fraction(7, 3), prec=256)
    assert r.threshold.overlaps(s.threshold)
    assert s.threshold.render().startswith(r.threshold.render()[:-1])
