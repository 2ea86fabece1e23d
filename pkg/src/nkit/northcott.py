"""Northcott-number bounds, the prime-root tower, and bounded enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterator

from flint import arb, fmpz, fmpz_poly

from .algebraic import (
    AlgebraicNumber,
    alg_add,
    alg_mul,
    alg_plus_reciprocal,
    alg_root,
    irreducible_factors,
    nth_root,
    rational,
    root_of,
    _make,
)
from .certified import CertifiedValue, default_precision, to_arb, to_fraction, working_precision
from .errors import DomainError, ResourceError
from .heights import mahler_ball, weil_ball

ENUM_MAX_DEGREE = 6
ENUM_MAX_HEIGHT = 5
ENUM_MAX_CANDIDATES = 2_000_000
TIE_TOLERANCE = 1e-12
TOWER_MAX_BITS = 1 << 14
TOWER_MAX_D = 512
TOWER_DEGREE_CAP = 64


def _real(x) -> arb:
    if isinstance(x, arb):
        return x
    if isinstance(x, CertifiedValue):
        return x.ball()
    return to_arb(to_fraction(x))


@dataclass(frozen=True)
class NorthcottBoundReport:
    direction: str
    metric: str
    mode: str
    C: str
    d: int
    aggregation_rule: str
    per_j: dict
    aggregate: CertifiedValue

    def to_json(self) -> dict:
        return {
            "direction": self.direction,
            "metric": self.metric,
            "mode": self.mode,
            "C": self.C,
            "d": self.d,
            "aggregation_rule": self.aggregation_rule,
            "per_j": {str(j): v.to_json() for j, v in sorted(self.per_j.items())},
            "aggregate": self.aggregate.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "NorthcottBoundReport":
        return cls(
            obj["direction"], obj["metric"], obj["mode"], obj["C"], int(obj["d"]), obj["aggregation_rule"],
            {int(j): CertifiedValue.from_json(v) for j, v in obj["per_j"].items()},
            CertifiedValue.from_json(obj["aggregate"]),
        )


def _check_d(d):
    if int(d) != d or d < 1:
        raise DomainError("d must be a positive integer")


def _clamp0(x: arb) -> arb:
    return x.max(arb(0))


def _log_binom(d, j) -> arb:
    return arb(comb(d, j)).log()


def _cstr(C) -> str:
    return str(C)


def _report(direction, metric, mode, C, d, rule, per_j, agg, prec) -> NorthcottBoundReport:
    with working_precision(prec):
        return NorthcottBoundReport(
            direction, metric, mode, _cstr(C), d, rule,
            {j: CertifiedValue.from_arb(v) for j, v in per_j.items()},
            CertifiedValue.from_arb(agg),
        )


def nc_lower_bound(C, d: int, mode: str = "simple", prec: int | None = None) -> NorthcottBoundReport:
    """Lower bound for N(X), X = numbers of degree <= d with h(x) > ... (height floor C)."""
    _check_d(d)
    prec = prec or default_precision()
    with working_precision(prec):
        c = _real(C)
        if mode == "simple":
            val = (c - d * arb(2).log()) / (d * 2**d)
            return _report("lower", "weil", mode, C, d, "theorem_simple", {}, _clamp0(val), prec)
        if mode == "optimal":
            per = {j: (c - _log_binom(d, j)) / (comb(d, j) * j) for j in range(1, d + 1)}
            agg = _clamp0(_min(per.values()))
            return _report("lower", "weil", mode, C, d, "min_over_j", per, agg, prec)
    raise DomainError(f"unknown mode {mode!r}")


def nc_house_lower_bound(C, d: int, mode: str = "simple", prec: int | None = None) -> NorthcottBoundReport:
    _check_d(d)
    prec = prec or default_precision()
    with working_precision(prec):
        c = _real(C)
        if c < 0:
            raise DomainError("C must be non-negative")

        def root(j):
            if c == 0:
                return arb(0)
            return c ** (arb(1) / j)

        if mode == "simple":
            return _report("lower", "house", mode, C, d, "theorem_simple", {}, root(d) / 2**d, prec)
        if mode == "optimal":
            per = {j: root(j) / comb(d, j) for j in range(1, d + 1)}
            return _report("lower", "house", mode, C, d, "min_over_j", per, _min(per.values()), prec)
    raise DomainError(f"unknown mode {mode!r}")


def nc_upper_bound(C, d: int, mode: str = "simple", prec: int | None = None) -> NorthcottBoundReport:
    """Upper bound for the Northcott number of a field from a degree-d family of height <= C.

    ``per_j_conservative`` aggregates the per-coefficient bounds by MAX;
    ``per_j_min`` exposes the literal minimum for comparison.
    """
    _check_d(d)
    prec = prec or default_precision()
    with working_precision(prec):
        c = _real(C)
        if mode == "simple":
            val = c * d * 2**d + d * arb(2).log()
            return _report("upper", "weil", mode, C, d, "theorem_simple", {}, val, prec)
        if mode in ("per_j_conservative", "per_j_min"):
            per = {j: comb(d, j) * j * c + _log_binom(d, j) for j in range(1, d + 1)}
            if mode == "per_j_conservative":
                return _report("upper", "weil", mode, C, d, "max_over_j", per, _max(per.values()), prec)
            return _report("upper", "weil", mode, C, d, "min_over_j", per, _min(per.values()), prec)
    raise DomainError(f"unknown mode {mode!r}")


def _min(vals):
    vals = list(vals)
    out = vals[0]
    for v in vals[1:]:
        out = out.min(v)
    return out


def _max(vals):
    vals = list(vals)
    out = vals[0]
    for v in vals[1:]:
        out = out.max(v)
    return out


def relative_floor(t, c):
    """max(t - c, 0): height floor for elements outside the subfield."""
    if t < 0 or c < 0:
        raise DomainError("t and c must be non-negative")
    return max(t - c, 0)


def coefficient_bound_check(x: AlgebraicNumber, prec: int | None = None) -> list[dict]:
    """Per j: h(e_j) against binom(d,j) j h(x) + log binom(d,j), e_j the j-th
    elementary symmetric function of the conjugates of x."""
    prec = prec or default_precision()
    cs = x.minpoly.coeffs
    d = x.degree
    with working_precision(prec):
        hx = weil_ball(x, prec)
        rows = []
        for j in range(1, d + 1):
            e = Fraction((-1) ** j * cs[d - j], cs[d])
            he = weil_ball(rational(e), prec)
            bound = comb(d, j) * j * hx + _log_binom(d, j)
            rows.append({"j": j, "h_ej": he, "bound": bound, "ok": not (he > bound)})
        agg = d * 2**d * hx + d * arb(2).log()
        rows.append({"j": "aggregate", "h_ej": _max([r["h_ej"] for r in rows]) if rows else arb(0),
                     "bound": agg, "ok": all(not (r["h_ej"] > agg) for r in rows)})
    return rows


# ---------------------------------------------------------------------------
# prime-root tower


@dataclass(frozen=True)
class TowerSpec:
    t: str
    steps: tuple
    eps: tuple
    primality: str = "proven"

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "steps": [{"p": str(p), "d": d} for p, d in self.steps],
            "eps": [f"{e.numerator}/{e.denominator}" for e in self.eps],
            "primality": self.primality,
        }

    @classmethod
    def from_json(cls, obj) -> "TowerSpec":
        return cls(
            str(obj["t"]),
            tuple((int(s["p"]), int(s["d"])) for s in obj["steps"]),
            tuple(Fraction(e) for e in obj["eps"]),
            obj.get("primality", "proven"),
        )

    def generators(self, k: int | None = None) -> list[AlgebraicNumber]:
        steps = self.steps if k is None else self.steps[:k]
        return [nth_root(p, d) for p, d in steps]


def _next_prime(n: int) -> int:
    n = max(n, 2)
    while True:
        z = fmpz(n)
        if z.is_probable_prime() and z.is_prime():
            return n
        n += 1


def _ceil_cert(x: arb):
    a, b = x.lower().ceil().unique_fmpz(), x.upper().ceil().unique_fmpz()
    return int(a) if a is not None and a == b else None


def _floor_cert(x: arb):
    a, b = x.lower().floor().unique_fmpz(), x.upper().floor().unique_fmpz()
    return int(a) if a is not None and a == b else None


def _tower_step(E_fn, eps: Fraction, d_min: int, p_prev: int):
    """Smallest d >= d_min, then smallest prime p > p_prev, with p in [(E-eps)^d, (E+eps)^d]."""
    for d in range(d_min, TOWER_MAX_D + 1):
        prec = 128
        while True:
            if prec > 1 << 16:
                raise ResourceError("cannot certify the tower interval endpoints")
            with working_precision(prec):
                E = E_fn()
                e = to_arb(eps)
                hi = (E + e) ** d
                if hi.upper() > arb(2) ** TOWER_MAX_BITS:
                    raise ResourceError("tower prime exceeds the integer-size cap")
                start = _ceil_cert((E - e) ** d)
                top = _floor_cert(hi)
            if start is not None and top is not None:
                break
            prec *= 2
        start = max(start, p_prev + 1)
        if start <= top:
            p = _next_prime(start)
            if p <= top:
                return p, d
    raise ResourceError("no admissible degree below the cap")


def build_tower(t, count: int) -> TowerSpec:
    """Greedy tower: p_i^{1/d_i} within 2^-i of exp(2t), p_i strictly increasing."""
    tq = to_fraction(t) if not isinstance(t, str) else Fraction(t)
    if tq <= 0:
        raise DomainError("t must be positive")
    if count < 1:
        raise DomainError("count must be positive")

    def E_fn():
        return (2 * to_arb(tq)).exp()

    steps = []
    eps = []
    p_prev, d_prev = 1, 1
    for i in range(1, count + 1):
        e = Fraction(1, 2**i)
        try:
            p, d = _tower_step(E_fn, e, d_prev, p_prev)
        except ResourceError as exc:
            raise ResourceError(str(exc), partial=TowerSpec(str(t), tuple(steps), tuple(eps))) from None
        steps.append((p, d))
        eps.append(e)
        p_prev, d_prev = p, d
    return TowerSpec(str(t), tuple(steps), tuple(eps))


def verify_tower(spec: TowerSpec, prec: int = 256) -> bool:
    """Recheck primality, monotonicity and |p^{1/d} - e^{2t}| <= eps_i."""
    tq = Fraction(spec.t)
    prev = 0
    with working_precision(prec):
        E = (2 * to_arb(tq)).exp()
        for (p, d), e in zip(spec.steps, spec.eps):
            if p <= prev or not fmpz(p).is_prime():
                return False
            dist = abs(arb(p).root(d) - E)
            if not dist <= to_arb(e):
                return False
            prev = p
    return True


# ---------------------------------------------------------------------------
# enumeration


def _height_le(poly_coeffs: tuple, k: int, B, prec: int) -> bool:
    with working_precision(prec):
        h = mahler_ball(fmpz_poly(list(poly_coeffs)), prec) / k
        return bool(h.lower() <= _real(B) + TIE_TOLERANCE)


def enumerate_bounded(d: int, B, prec: int | None = None) -> Iterator[AlgebraicNumber]:
    """Every algebraic number of degree <= d with Weil height <= B, exactly once.

    Candidates are irreducible primitive polynomials of degree k <= d with
    |a_j| <= binom(k, j) exp(kB) (from |a_j| <= binom(k,j) M(f)); a height
    equal to B up to TIE_TOLERANCE counts as <= B.
    """
    _check_d(d)
    if d > ENUM_MAX_DEGREE:
        raise DomainError(f"degree cap {ENUM_MAX_DEGREE} exceeded")
    Bq = float(B) if not isinstance(B, arb) else float(B.mid())
    if Bq > ENUM_MAX_HEIGHT:
        raise DomainError(f"height cap {ENUM_MAX_HEIGHT} exceeded")
    if Bq < 0:
        return
    prec = prec or default_precision()
    import math

    for k in range(1, d + 1):
        M = math.exp(k * Bq) * (1 + 1e-9)
        bounds = [int(math.floor(comb(k, j) * M + TIE_TOLERANCE)) for j in range(k + 1)]
        total = 1
        for b in bounds:
            total *= 2 * b + 1
        if total > ENUM_MAX_CANDIDATES:
            raise ResourceError(f"{total} candidate polynomials of degree {k} exceed the enumeration cap")
        ranges = [range(-b, b + 1) for b in bounds[:-1]] + [range(1, bounds[-1] + 1)]
        for coeffs in itertools.product(*ranges):
            if k > 1 and coeffs[0] == 0:
                continue
            g = 0
            for c in coeffs:
                g = math.gcd(g, c)
            if g != 1:
                continue
            f = fmpz_poly(list(coeffs))
            facs = irreducible_factors(f)
            if len(facs) != 1 or facs[0].degree() != k:
                continue
            if not _height_le(coeffs, k, B, prec):
                continue
            if k == 1:
                yield rational(Fraction(-coeffs[0], coeffs[1]))
            else:
                for i in range(k):
                    yield _make(f, i)


def tower_field_elements(spec: TowerSpec, k: int, d: int, B, prec: int | None = None) -> Iterator[AlgebraicNumber]:
    """Sound sample of elements of Q(p_1^{1/d_1}, ..., p_k^{1/d_k}) with degree <= d and height <= B.

    Elements are rationals of height <= B (from enumerate_bounded), basis
    monomials prod r_i^{e_i} times coefficients in {+-1, +-2, +-1/2}, and
    sums of a rational and such a term.  Not complete.
    """
    if k < 0 or k > len(spec.steps):
        raise DomainError("truncation outside the tower")
    field_deg = 1
    for p, di in spec.steps[:k]:
        field_deg *= di
    if field_deg * d > TOWER_DEGREE_CAP:
        raise DomainError(f"field degree {field_deg} times d={d} exceeds cap {TOWER_DEGREE_CAP}")
    prec = prec or default_precision()
    seen = set()
    rationals = list(enumerate_bounded(1, min(float(B), 2.0) if k else B, prec))
    if k == 0:
        for r in enumerate_bounded(1, B, prec):
            yield r
        return
    for r in rationals:
        if r.key() not in seen and _ok(r, d, B, prec):
            seen.add(r.key())
            yield r
    gens = spec.generators(k)
    monos = []
    for exps in itertools.product(*(range(di) for _, di in spec.steps[:k])):
        if not any(exps):
            continue
        m = rational(1)
        for g, e in zip(gens, exps):
            for _ in range(e):
                m = alg_mul(m, g)
        monos.append(m)
    coefs = [rational(c) for c in (1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2))]
    shifts = [r for r in rationals if not r.is_zero()][:6]
    for m in monos:
        for c in coefs:
            x = alg_mul(c, m)
            if x.degree > d:
                continue
            for y in [x] + [alg_add(x, s) for s in shifts]:
                if y.key() not in seen and _ok(y, d, B, prec):
                    seen.add(y.key())
                    yield y


def _ok(x: AlgebraicNumber, d: int, B, prec: int) -> bool:
    if x.degree > d:
        return False
    with working_precision(prec):
        return bool(weil_ball(x, prec).lower() <= _real(B) + TIE_TOLERANCE)


# ---------------------------------------------------------------------------
# the totally-real-field example built from (2 - i)/(2 + i)


def qtr_base() -> AlgebraicNumber:
    """(2 - i)/(2 + i) = (3 - 4i)/5, root of 5x^2 - 6x + 5 with negative imaginary part."""
    return root_of([5, -6, 5], 0)


def qtr_alpha(k: int) -> AlgebraicNumber:
    """Principal k-th root of (2 - i)/(2 + i)."""
    return alg_root(qtr_base(), k)


def qtr_trace(k: int) -> AlgebraicNumber:
    """alpha_k + conj(alpha_k) = alpha_k + 1/alpha_k (|alpha_k| = 1), a totally real number."""
    return alg_plus_reciprocal(qtr_alpha(k))
