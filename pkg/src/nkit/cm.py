"""Reduced forms, Hilbert class polynomials and CM height profiles.

j(tau) = E4(q)^3 / (q prod (1 - q^n)^24) with E4 = 1 + 240 sum sigma_3(n) q^n
and the product from Euler's pentagonal series.  For reduced forms
|q| <= exp(-pi sqrt 3), and both truncations carry explicit tail bounds.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt, sqrt

from flint import acb, arb, fmpz

from .algebraic import IntPolynomial, root_of
from .certified import CertifiedValue, default_precision, working_precision
from .errors import DomainError, ResourceError
from .heights import house_ball, weil_ball

PRECISION_CAP = 100_000
DEFAULT_START_BITS = 1000
ROUNDING_SLACK = arb(2) ** -16


def is_fundamental_discriminant(d: int) -> bool:
    if d >= 0:
        return False
    m = -d
    if d % 4 == 1 or d % 4 == -3:
        return _squarefree(m)
    if d % 4 == 0:
        k = d // 4
        if k % 4 in (2, 3):
            return _squarefree(abs(k))
    return False


def _squarefree(m: int) -> bool:
    if m == 1:
        return True
    return all(e == 1 for _, e in fmpz(m).factor())


def fundamental_discriminants(lo: int, hi: int) -> list[int]:
    """Negative fundamental discriminants with lo <= |d| <= hi, by increasing |d|."""
    return [-m for m in range(max(lo, 3), hi + 1) if is_fundamental_discriminant(-m)]


@dataclass(frozen=True, order=True)
class ReducedForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def tau(self, prec: int) -> acb:
        with working_precision(prec):
            return acb(arb(-self.b), arb(-self.disc).sqrt()) / (2 * self.a)


def _check_disc(d: int):
    if not isinstance(d, int) or not is_fundamental_discriminant(d):
        raise DomainError(f"{d} is not a negative fundamental discriminant")


def reduced_forms(d: int) -> list[ReducedForm]:
    """Primitive reduced forms (a, b, c) of discriminant d: |b| <= a <= c, b >= 0 on the boundary."""
    _check_disc(d)
    out = []
    amax = isqrt(-d // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if gcd(gcd(a, abs(b)), c) != 1:
                continue
            out.append(ReducedForm(a, b, c))
    return out


@lru_cache(maxsize=None)
def _sigma3_table(n: int) -> tuple:
    s = [0] * (n + 1)
    for d in range(1, n + 1):
        d3 = d**3
        for m in range(d, n + 1, d):
            s[m] += d3
    return tuple(s)


def _tail_e4(r: arb, K: int) -> arb:
    """Upper bound for sum_{n > K} n^4 r^n (>= sum sigma_3(n) r^n)."""
    ratio = r * (arb(K + 2) / (K + 1)) ** 4
    if not ratio < 1:
        return None
    return (arb(K + 1) ** 4 * r ** (K + 1) / (1 - ratio)).upper()


def j_ball(tau: acb, prec: int) -> acb:
    """j(tau) for Im tau >= sqrt(3)/2, with certified truncation."""
    with working_precision(prec + 32):
        q = (2 * acb.pi() * acb(0, 1) * tau).exp()
        r = abs(q)
        if not r < arb("0.01"):
            raise DomainError("tau outside the fundamental domain")
        # number of terms: r^K below 2^-(prec+32) relative
        lr = -r.log().mid()
        K = max(4, int(float((prec + 64) * arb(2).log().mid() / lr)) + 2)
        sig = _sigma3_table(K)
        s = acb(0)
        qn = acb(1)
        for n in range(1, K + 1):
            qn *= q
            s += sig[n] * qn
        t = _tail_e4(r, K)
        if t is None:
            raise ResourceError("E4 tail bound did not converge")
        e4 = 1 + 240 * (s + acb(arb(0, t), arb(0, t)))
        # pentagonal series for prod (1 - q^n)
        P = acb(1)
        k = 1
        while True:
            e1 = k * (3 * k - 1) // 2
            e2 = k * (3 * k + 1) // 2
            if e1 > K + 2:
                break
            sign = -1 if k % 2 else 1
            P += sign * (q**e1 + q**e2)
            k += 1
        tp = (2 * r ** ((k) * (3 * k - 1) // 2) / (1 - r)).upper()
        P += acb(arb(0, tp), arb(0, tp))
        return e4**3 / (q * P**24)


def j_value(form: ReducedForm, prec: int) -> acb:
    return j_ball(form.tau(prec + 16), prec)


def _estimate_bits(forms) -> int:
    total = 0.0
    for f in forms:
        # log2 |j| ~ pi sqrt|d| / (a ln 2)
        total += 3.1416 * sqrt(-f.disc) / f.a / 0.6931 + 2
    return int(total) + 64


def _round_coeffs(forms, prec: int):
    with working_precision(prec):
        js = [j_value(f, prec) for f in forms]
        poly = [acb(1)]
        for j in js:
            nxt = [acb(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] += c
                nxt[i] -= j * c
            poly = nxt
        out = []
        for c in poly:
            if not abs(c.imag) < ROUNDING_SLACK:
                return None
            re = c.real
            v = (re + arb("0.5")).floor().unique_fmpz()
            if v is None:
                return None
            if not abs(re - v) < ROUNDING_SLACK:
                return None
            out.append(int(v))
        return out


@lru_cache(maxsize=4096)
def class_polynomial(d: int, working_precision_bits: int | None = None) -> IntPolynomial:
    """H_d(x) = prod over reduced forms of (x - j(tau)), coefficients stable under precision doubling."""
    _check_disc(d)
    forms = reduced_forms(d)
    start = working_precision_bits or DEFAULT_START_BITS
    P = max(start, _estimate_bits(forms))
    while 2 * P <= PRECISION_CAP:
        a = _round_coeffs(forms, P)
        if a is not None:
            b = _round_coeffs(forms, 2 * P)
            if a == b:
                return IntPolynomial(tuple(a))
        P *= 2
    raise ResourceError(f"class polynomial for {d} needs more than {PRECISION_CAP} bits")


@dataclass(frozen=True)
class CMProfileRow:
    disc: int
    class_number: int
    height: CertifiedValue
    house_log: CertifiedValue | None
    ratio_h: CertifiedValue
    ratio_house: CertifiedValue | None
    route: str

    def to_json(self) -> dict:
        return {
            "disc": self.disc,
            "class_number": self.class_number,
            "height": self.height.to_json(),
            "house_log": None if self.house_log is None else self.house_log.to_json(),
            "ratio_h": self.ratio_h.to_json(),
            "ratio_house": None if self.ratio_house is None else self.ratio_house.to_json(),
            "route": self.route,
        }

    @classmethod
    def from_json(cls, obj) -> "CMProfileRow":
        opt = lambda v: None if v is None else CertifiedValue.from_json(v)
        return cls(int(obj["disc"]), int(obj["class_number"]), CertifiedValue.from_json(obj["height"]),
                   opt(obj["house_log"]), CertifiedValue.from_json(obj["ratio_h"]), opt(obj["ratio_house"]),
                   obj["route"])

    CSV_FIELDS = ("disc", "class_number", "height", "house_log", "ratio_h", "ratio_house", "route")

    def csv_row(self) -> list[str]:
        f = lambda v: "" if v is None else v.render()
        return [str(self.disc), str(self.class_number), f(self.height), f(self.house_log),
                f(self.ratio_h), f(self.ratio_house), self.route]


def _profile_direct(d: int, prec: int):
    """Heights from the j-values directly (CM j-invariants are algebraic integers)."""
    forms = reduced_forms(d)
    with working_precision(prec):
        js = [j_value(f, prec) for f in forms]
        mods = [abs(j) for j in js]
        h = sum((m.max(arb(1)).log() for m in mods), arb(0)) / len(forms)
        top = mods[0]
        for m in mods[1:]:
            top = top.max(m)
        house_log = None if top.contains(0) else top.log()
        return len(forms), h, house_log


def _profile_minpoly(d: int, prec: int):
    H = class_polynomial(d)
    x = root_of(H, 0)
    with working_precision(prec):
        h = weil_ball(x, prec)
        hb = house_ball(x, prec)
        house_log = None if hb.contains(0) else hb.log()
    return H.degree, h, house_log


def _profile_row(d: int, route: str, prec: int) -> CMProfileRow:
    _check_disc(d)
    if route == "direct":
        hn, h, hl = _profile_direct(d, prec)
    elif route == "minpoly":
        hn, h, hl = _profile_minpoly(d, prec)
    else:
        raise DomainError(f"unknown route {route!r}")
    with working_precision(prec):
        s = arb(-d).sqrt()
        return CMProfileRow(
            d, hn, CertifiedValue.from_arb(h), None if hl is None else CertifiedValue.from_arb(hl),
            CertifiedValue.from_arb(h / s), None if hl is None else CertifiedValue.from_arb(hl / s), route,
        )


def cm_profile(discs, route: str = "direct", prec: int | None = None, workers: int = 1) -> list[CMProfileRow]:
    """Per discriminant: class number, h(j), log house(j), both divided by sqrt|d|.

    ``route="minpoly"`` computes H_d and takes heights of one of its roots;
    ``route="direct"`` uses the j-values of the reduced forms (the conjugates
    of j, all algebraic integers), which scales to large |d|.  Rows come back
    sorted by |d| whatever the number of worker processes.
    """
    prec = prec or default_precision()
    ds = sorted(set(discs), key=lambda v: (abs(v), v))
    for d in ds:
        _check_disc(d)
    if workers <= 1 or len(ds) < 2:
        return [_profile_row(d, route, prec) for d in ds]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_profile_row, ds, [route] * len(ds), [prec] * len(ds), chunksize=64))


def weighted_exponent_probe(rows, gamma) -> dict:
    """h_gamma = class_number^gamma * h along rows sorted by |d|, with a least-squares trend.

    Descriptive only: the slope of h_gamma against |d| over all rows and over
    the upper half ("tail").
    """
    rows = sorted(rows, key=lambda r: abs(r.disc))
    if len(rows) < 5:
        raise DomainError("the probe needs at least 5 rows")
    g = float(gamma)
    xs = [float(abs(r.disc)) for r in rows]
    ys = [r.class_number**g * float(r.height.mid) for r in rows]
    slope = statistics.linear_regression(xs, ys).slope
    half = len(rows) // 2
    tail_slope = statistics.linear_regression(xs[half:], ys[half:]).slope
    return {
        "gamma": g,
        "count": len(rows),
        "discs": [r.disc for r in rows],
        "values": ys,
        "max": max(ys),
        "min": min(ys),
        "slope": slope,
        "tail_slope": tail_slope,
        "tail_trend": "non-increasing" if tail_slope <= 0 else "increasing",
    }
