"""Absolute heights of algebraic numbers, projective tuples and polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from flint import arb, fmpz, fmpz_poly

from .algebraic import AlgebraicNumber, IntPolynomial, as_flint, coerce, root_balls
from .certified import CertifiedValue, default_precision, log_int, to_arb, working_precision
from .errors import DomainError
from .orbits import (
    ProjectiveTuple,
    orbit_chow_terms,
    orbit_lead,
    point_orbit,
    primitive_int_vector,
)

__all__ = [
    "HeightKind",
    "ProjectiveTuple",
    "weil_height",
    "house",
    "mahler_measure",
    "weighted_height",
    "projective_height",
    "l2_height",
    "poly_height",
    "product_formula_defect",
]


@dataclass(frozen=True)
class HeightKind:
    name: str
    gamma: float | None = None

    def __post_init__(self):
        if self.name not in ("weil", "house", "l2", "weighted"):
            raise DomainError(f"unknown height kind {self.name!r}")
        if self.name == "weighted":
            if self.gamma is None or self.gamma != self.gamma or abs(self.gamma) == float("inf"):
                raise DomainError("weighted height needs a finite gamma")

    @classmethod
    def weighted(cls, gamma) -> "HeightKind":
        return cls("weighted", gamma)


HeightKind.WEIL = HeightKind("weil")
HeightKind.HOUSE = HeightKind("house")
HeightKind.L2 = HeightKind("l2")


def _prec(prec):
    return default_precision() if prec is None else int(prec)


def _max(balls):
    return reduce(lambda a, b: a.max(b), balls)


def log_plus(x: arb) -> arb:
    """log max(1, x) for a non-negative ball."""
    return x.max(arb(1)).log()


# ---------------------------------------------------------------------------
# one algebraic number


def mahler_ball(f, prec: int) -> arb:
    """log M(f) as a ball; roots counted with multiplicity."""
    f = as_flint(f)
    if f.degree() < 0:
        raise DomainError("Mahler measure of the zero polynomial")
    lc = f.coeffs()[-1]
    with working_precision(prec):
        acc = log_int(lc)
        if f.degree() >= 1:
            for r, m in f.complex_roots():
                acc += m * log_plus(abs(r))
    return acc


def weil_ball(a: AlgebraicNumber, prec: int) -> arb:
    a = coerce(a)
    with working_precision(prec):
        if a.is_rational:
            q = a.as_fraction()
            if q == 0:
                return arb(0)
            return log_int(max(abs(q.numerator), q.denominator))
        acc = log_int(a.minpoly.leading)
        for r in root_balls(a.minpoly.coeffs, prec):
            acc += log_plus(abs(r))
        return acc / a.degree


def weil_height(a, prec: int | None = None) -> CertifiedValue:
    """Absolute logarithmic Weil height, (1/deg) log M(minpoly)."""
    return CertifiedValue.from_arb(weil_ball(a, _prec(prec)))


def house_ball(a: AlgebraicNumber, prec: int) -> arb:
    a = coerce(a)
    with working_precision(prec):
        if a.is_rational:
            return abs(to_arb(a.as_fraction()))
        return _max([abs(r) for r in root_balls(a.minpoly.coeffs, prec)])


def house(a, prec: int | None = None) -> CertifiedValue:
    """Maximum modulus of the conjugates."""
    return CertifiedValue.from_arb(house_ball(a, _prec(prec)))


def mahler_measure(f, prec: int | None = None) -> CertifiedValue:
    """M(f) = |lc| prod max(1, |root|)."""
    p = _prec(prec)
    with working_precision(p):
        return CertifiedValue.from_arb(mahler_ball(f, p).exp())


def log_mahler_measure(f, prec: int | None = None) -> CertifiedValue:
    return CertifiedValue.from_arb(mahler_ball(f, _prec(prec)))


def weighted_height(a, gamma, prec: int | None = None) -> CertifiedValue:
    """deg(a)^gamma * h(a)."""
    a = coerce(a)
    p = _prec(prec)
    with working_precision(p):
        w = to_arb(Fraction(gamma)) if not isinstance(gamma, arb) else gamma
        return CertifiedValue.from_arb(arb(a.degree) ** w * weil_ball(a, p))


def product_formula_defect(a, prec: int | None = None) -> CertifiedValue:
    """(1/deg) sum over all places of log|a|_v, assembled place by place.

    Archimedean terms come from certified conjugates; the finite part at p is
    v_p(a_0) - v_p(a_d) of the primitive minimal polynomial (Newton polygon),
    obtained by factoring the two end coefficients.  The result must be 0.
    """
    a = coerce(a)
    if a.is_zero():
        raise DomainError("product formula needs a nonzero number")
    p = _prec(prec)
    cs = a.minpoly.coeffs
    a0, ad = cs[0], cs[-1]
    with working_precision(p):
        arch = arb(0)
        if a.is_rational:
            arch = abs(to_arb(a.as_fraction())).log()
        else:
            for r in root_balls(cs, p):
                arch += abs(r).log()
        finite = arb(0)
        primes = {int(q) for q, _ in fmpz(abs(a0)).factor()} | {int(q) for q, _ in fmpz(abs(ad)).factor()}
        for q in sorted(primes):
            e = _val(a0, q) - _val(ad, q)
            # |a|_p contribution: -e * log p
            finite -= e * log_int(q)
        return CertifiedValue.from_arb((arch + finite) / a.degree)


def _val(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# projective tuples


def _as_tuple(P) -> ProjectiveTuple:
    if isinstance(P, ProjectiveTuple):
        return P
    return ProjectiveTuple(P)


def _tuple_ball(P: ProjectiveTuple, prec: int, norm: str) -> arb:
    with working_precision(prec):
        if P.is_rational():
            v = primitive_int_vector([c.as_fraction() for c in P.coords])
            if norm == "max":
                return log_int(max(abs(x) for x in v))
            return arb(sum(x * x for x in v)).log() / 2
        orbit = point_orbit(P)
        m = orbit_lead(orbit, orbit_chow_terms(orbit))
        acc = log_int(m)
        for tau in orbit.member_balls(prec):
            if norm == "max":
                acc += _max([abs(t) for t in tau]).log()
            else:
                acc += sum((abs(t) ** 2 for t in tau), arb(0)).log() / 2
        return acc / orbit.size


def projective_ball(P, prec: int) -> arb:
    return _tuple_ball(_as_tuple(P), prec, "max")


def l2_ball(P, prec: int) -> arb:
    return _tuple_ball(_as_tuple(P), prec, "l2")


def projective_height(P, prec: int | None = None) -> CertifiedValue:
    """Absolute sup-norm height of a point of P^n with algebraic coordinates."""
    return CertifiedValue.from_arb(projective_ball(P, _prec(prec)))


def l2_height(P, prec: int | None = None) -> CertifiedValue:
    """As projective_height with the Euclidean norm at archimedean places."""
    return CertifiedValue.from_arb(l2_ball(P, _prec(prec)))


# ---------------------------------------------------------------------------
# polynomials


def _coefficient_tuple(f) -> list:
    if isinstance(f, IntPolynomial):
        return list(f.coeffs)
    if isinstance(f, fmpz_poly):
        return [int(c) for c in f.coeffs()]
    if isinstance(f, dict):
        return [f[k] for k in sorted(f)]
    return list(f)


def poly_height(f, kind: HeightKind = HeightKind.WEIL, prec: int | None = None) -> CertifiedValue:
    """Height of the coefficient vector of ``f`` as a projective tuple.

    ``f`` may be an IntPolynomial, a coefficient sequence (algebraic entries
    allowed) or a dict mapping exponents to coefficients (multivariate).
    """
    cs = [coerce(c) for c in _coefficient_tuple(f)]
    if not cs or all(c.is_zero() for c in cs):
        raise DomainError("height of the zero polynomial")
    P = ProjectiveTuple(cs)
    if kind.name == "weil":
        return projective_height(P, prec)
    if kind.name == "l2":
        return l2_height(P, prec)
    raise DomainError(f"poly_height supports the weil and l2 kinds, not {kind.name}")


def height(a, kind: HeightKind = HeightKind.WEIL, prec: int | None = None) -> CertifiedValue:
    """Dispatch on a HeightKind for a single algebraic number or a tuple."""
    if isinstance(a, (ProjectiveTuple, list, tuple)):
        if kind.name == "weil":
            return projective_height(a, prec)
        if kind.name == "l2":
            return l2_height(a, prec)
        raise DomainError(f"{kind.name} height is defined for numbers, not tuples")
    if kind.name == "weil":
        return weil_height(a, prec)
    if kind.name == "house":
        return house(a, prec)
    if kind.name == "weighted":
        return weighted_height(a, kind.gamma, prec)
    return l2_height(ProjectiveTuple.of(a, 1), prec)
