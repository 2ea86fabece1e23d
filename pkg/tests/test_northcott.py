import json
import math
import random
from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from helpers import rand_algebraic
from nkit.errors import DomainError
from nkit.heights import weil_height
from nkit.northcott import (
    NorthcottBoundReport,
    TowerSpec,
    build_tower,
    coefficient_bound_check,
    enumerate_bounded,
    nc_house_lower_bound,
    nc_lower_bound,
    nc_upper_bound,
    qtr_alpha,
    qtr_trace,
    relative_floor,
    tower_field_elements,
    verify_tower,
)

LOG2 = math.log(2)


def val(rep) -> float:
    return float(rep.aggregate.mid)


def test_lower_bound_examples():
    assert abs(val(nc_lower_bound(10, 2, "simple")) - (10 - 2 * LOG2) / 8) < 1e-15
    assert abs(val(nc_lower_bound(10, 2, "optimal")) - min((10 - LOG2) / 2, 10 / 2)) < 1e-15
    assert nc_lower_bound(0, 3, "simple").aggregate.contains(0)
    with pytest.raises(DomainError):
        nc_lower_bound(1, 0)


def test_house_lower_bound_examples():
    assert nc_house_lower_bound(16, 2, "simple").aggregate.contains(1)
    assert nc_house_lower_bound(16, 2, "optimal").aggregate.contains(4)
    for mode in ("simple", "optimal"):
        assert nc_house_lower_bound(0, 3, mode).aggregate.contains(0)


def test_upper_bound_examples():
    r = nc_upper_bound(0, 2, "per_j_conservative")
    assert abs(float(r.per_j[1].mid) - LOG2) < 1e-15 and r.per_j[2].contains(0)
    assert abs(val(r) - LOG2) < 1e-15 and r.aggregation_rule == "max_over_j"
    assert nc_upper_bound(0, 2, "per_j_min").aggregate.contains(0)
    assert abs(val(nc_upper_bound(1, 1, "simple")) - (2 + LOG2)) < 1e-15
    assert abs(val(nc_upper_bound(0, 1, "simple")) - LOG2) < 1e-15


def test_report_json_round_trip():
    r = nc_upper_bound(Fraction(3, 2), 4, "per_j_conservative")
    s = json.dumps(r.to_json())
    assert json.dumps(NorthcottBoundReport.from_json(json.loads(s)).to_json()) == s


@given(st.fractions(min_value=0, max_value=200, max_denominator=50), st.integers(1, 8))
@settings(max_examples=80, deadline=None)
def test_optimal_dominates_simple(C, d):
    if C < d * LOG2:
        return
    assert nc_lower_bound(C, d, "optimal").aggregate.upper >= nc_lower_bound(C, d, "simple").aggregate.lower


def test_relative_floor():
    assert relative_floor(5, 2) == 3
    assert relative_floor(1, 3) == 0
    assert relative_floor(Fraction(7, 3), 0) == Fraction(7, 3)


def test_coefficient_rows_cover_every_j():
    rng = random.Random(2)
    for _ in range(50):
        x = rand_algebraic(rng)
        rows = coefficient_bound_check(x)
        assert [r["j"] for r in rows] == list(range(1, x.degree + 1)) + ["aggregate"]
        assert all(r["ok"] for r in rows)


def brute_rationals(B: float):
    out = set()
    M = int(math.exp(B) + 1e-9)
    for p in range(-M, M + 1):
        for q in range(1, M + 1):
            if math.gcd(p, q) == 1 and math.log(max(abs(p), q)) <= B + 1e-12:
                out.add(Fraction(p, q))
    return out


@pytest.mark.parametrize("B", [0, LOG2, 1.2, 2])
def test_rational_enumeration_against_brute_force(B):
    got = [x.as_fraction() for x in enumerate_bounded(1, B)]
    assert len(got) == len(set(got))
    assert set(got) == brute_rationals(B)


def test_enumeration_log2_example():
    got = {x.as_fraction() for x in enumerate_bounded(1, LOG2)}
    assert got == {Fraction(v) for v in (0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2))}


def test_quadratic_enumeration_against_mpmath():
    B = 0.4
    mpmath.mp.dps = 30
    oracle = set()
    bound = int(2 * math.exp(2 * B))
    for a, b, c in product(range(1, bound + 1), range(-bound, bound + 1), range(-bound, bound + 1)):
        if c == 0 or math.gcd(math.gcd(a, b), c) != 1 or b * b - 4 * a * c == 0:
            continue
        disc = b * b - 4 * a * c
        if disc >= 0 and math.isqrt(disc) ** 2 == disc:
            continue  # reducible over Q
        roots = mpmath.polyroots([a, b, c])
        h = (mpmath.log(a) + sum(mpmath.log(max(1, abs(r))) for r in roots)) / 2
        if h <= B:
            oracle.add((c, b, a))
    got = [x for x in enumerate_bounded(2, B) if x.degree == 2]
    polys = {x.minpoly.coeffs for x in got}
    assert polys == oracle
    assert len(got) == 2 * len(polys)
    # height-0 quadratics are exactly the cyclotomic ones: x^2+1, x^2+x+1, x^2-x+1
    zero = {x.minpoly.coeffs for x in got if weil_height(x).contains(0)}
    assert zero == {(1, 0, 1), (1, 1, 1), (1, -1, 1)}


def test_enumeration_caps():
    with pytest.raises(DomainError):
        list(enumerate_bounded(7, 0))
    with pytest.raises(DomainError):
        list(enumerate_bounded(1, 6))


def test_tower_small_and_round_trip():
    t = build_tower(1, 3)
    assert t.steps[0] == (7, 1)
    assert verify_tower(t)
    assert TowerSpec.from_json(json.loads(json.dumps(t.to_json()))) == t
    one = build_tower(Fraction(1, 2), 1)
    p, d = one.steps[0]
    assert abs(p ** (1 / d) - math.e) <= 0.5


def test_verify_tower_rejects_tampering():
    t = build_tower(1, 3)
    bad = TowerSpec(t.t, ((7, 1), (51, 2), t.steps[2]), t.eps)
    assert not verify_tower(bad)
    far = TowerSpec(t.t, ((11, 1),) + t.steps[1:], t.eps)
    assert not verify_tower(far)


def test_tower_field_elements():
    t = build_tower(1, 3)
    k0 = {x.as_fraction() for x in tower_field_elements(t, 0, 1, LOG2)}
    assert k0 == {x.as_fraction() for x in enumerate_bounded(1, LOG2)}
    assert all(x.is_rational for x in tower_field_elements(t, 1, 1, 1))
    elems = list(tower_field_elements(t, 2, 2, 3))
    r = [x for x in elems if x.minpoly.coeffs == (-53, 0, 1)]
    assert r and abs(float(weil_height(r[0]).mid) - math.log(53) / 2) < 1e-14
    assert all(weil_height(x).lower <= 3 for x in elems)


def test_qtr_small_cases():
    a1 = qtr_alpha(1)
    assert a1.minpoly.coeffs == (5, -6, 5)
    a3 = qtr_alpha(3)
    assert a3.degree == 6 and abs(float(weil_height(a3).mid) - math.log(5) / 6) < 1e-15
    t = qtr_trace(3)
    assert t.is_real()
