import json
import math

import pytest
from flint import arb, fmpz_poly

from nkit.certified import working_precision
from nkit.cm import (
    CMProfileRow,
    ReducedForm,
    class_polynomial,
    cm_profile,
    fundamental_discriminants,
    is_fundamental_discriminant,
    j_value,
    reduced_forms,
    weighted_exponent_probe,
)
from nkit.errors import DomainError


def test_fundamental_discriminants():
    assert fundamental_discriminants(1, 40) == [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24, -31, -35, -39, -40]
    assert not is_fundamental_discriminant(-12) and not is_fundamental_discriminant(-16)
    assert not is_fundamental_discriminant(5)


def test_reduced_forms_and_class_numbers():
    assert reduced_forms(-23) == [ReducedForm(1, 1, 6), ReducedForm(2, -1, 3), ReducedForm(2, 1, 3)]
    known = {-3: 1, -4: 1, -20: 2, -23: 3, -47: 5, -71: 7, -56: 4, -163: 1, -5923: 7, -3299: 27}
    for d, h in known.items():
        assert len(reduced_forms(d)) == h
    for f in reduced_forms(-5923):
        assert f.disc == -5923 and abs(f.b) <= f.a <= f.c
    with pytest.raises(DomainError):
        reduced_forms(-12)


def test_small_class_polynomials():
    assert class_polynomial(-3).coeffs == (0, 1)
    assert class_polynomial(-4).coeffs == (-1728, 1)
    assert class_polynomial(-7).coeffs == (3375, 1)
    assert class_polynomial(-8).coeffs == (-8000, 1)


@pytest.mark.parametrize("d", fundamental_discriminants(3, 400))
def test_class_polynomial_matches_flint(d):
    ours = class_polynomial(d)
    assert list(ours.coeffs) == [int(c) for c in fmpz_poly.hilbert_class_poly(d).coeffs()]


def test_j_value_matches_modular_j():
    for d in (-23, -163, -5923):
        for f in reduced_forms(d)[:4]:
            with working_precision(300):
                ours = j_value(f, 300)
                ref = f.tau(300).modular_j()
                assert ours.overlaps(ref)
                assert abs(ours - ref) < arb(2) ** -200 * (1 + abs(ref))


def test_profile_examples_and_routes():
    rows = cm_profile([-4, -3, -23, -47])
    by = {r.disc: r for r in rows}
    assert [r.disc for r in rows] == [-3, -4, -23, -47]
    with working_precision(128):
        assert abs(by[-4].height.ball() - arb(1728).log()) < 1e-30
    assert by[-4].class_number == 1
    assert by[-3].house_log is None and by[-3].height.contains(0)
    for d in (-23, -47, -71, -104):
        a = cm_profile([d], route="direct")[0]
        b = cm_profile([d], route="minpoly")[0]
        assert a.class_number == b.class_number
        assert a.height.overlaps(b.height)
        assert a.house_log.overlaps(b.house_log)


def test_house_ratio_near_pi():
    r = cm_profile([-5923])[0]
    assert abs(float(r.ratio_house.mid) - math.pi) < 1e-3


def test_row_serialization():
    r = cm_profile([-23])[0]
    s = json.dumps(r.to_json())
    assert json.dumps(CMProfileRow.from_json(json.loads(s)).to_json()) == s
    row = r.csv_row()
    assert len(row) == len(CMProfileRow.CSV_FIELDS) and row[0] == "-23"


def test_workers_preserve_order():
    ds = fundamental_discriminants(100, 160)
    a = cm_profile(ds, workers=1)
    b = cm_profile(list(reversed(ds)), workers=2)
    assert [r.to_json() for r in a] == [r.to_json() for r in b]


def test_weighted_probe():
    rows = cm_profile(fundamental_discriminants(1000, 1400))
    p = weighted_exponent_probe(rows, -2)
    assert p["count"] == len(rows)
    assert all(abs(v - float(r.height.mid) / r.class_number**2) < 1e-12 for v, r in zip(p["values"], rows))
    assert p["tail_trend"] in ("non-increasing", "increasing")
    with pytest.raises(DomainError):
        weighted_exponent_probe(rows[:4], -2)


def test_rejects_bad_input():
    with pytest.raises(DomainError):
        cm_profile([-12])
    with pytest.raises(DomainError):
        cm_profile([-23], route="nope")
    with pytest.raises(DomainError):
        class_polynomial(7)
