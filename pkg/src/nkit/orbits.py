"""Projective tuples and their Galois orbits.

A tuple with algebraic coordinates is normalized to ``y = x / x_j`` (``j`` the
first nonzero coordinate).  Its Galois orbit is found inside the product of
the conjugate sets of the coordinates by matching the conjugates of a
separating linear combination ``theta = sum c_t y_t``.  Expanding
``prod_orbit (sum_i u_i tau_i)`` and clearing denominators gives the integral
primitive linear-form product (the Chow form of the orbit).  Its coefficient
``m`` at ``u_j^k`` carries all finite-place information:

    h(P) = (log|m| + sum_orbit log max_i |tau_i|) / k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, log2
from typing import Sequence

from flint import acb, fmpz

from .algebraic import (
    MAX_DEGREE,
    AlgebraicNumber,
    alg_add,
    alg_inv,
    alg_mul,
    coerce,
    rational,
)
from .certified import working_precision
from .errors import DomainError, ResourceError

MAX_TUPLES = 4096
MAX_MONOMIALS = 200_000
SEPARATOR_ATTEMPTS = 12


@dataclass(frozen=True, eq=False)
class ProjectiveTuple:
    coords: tuple

    def __init__(self, coords: Sequence):
        cs = tuple(coerce(c) for c in coords)
        if not cs:
            raise DomainError("empty projective tuple")
        if all(c.is_zero() for c in cs):
            raise DomainError("all-zero projective tuple")
        object.__setattr__(self, "coords", cs)

    @classmethod
    def of(cls, *xs) -> "ProjectiveTuple":
        return cls(xs)

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    def is_rational(self) -> bool:
        return all(c.is_rational for c in self.coords)

    def normalized(self) -> tuple[int, tuple[AlgebraicNumber, ...]]:
        return _normalize(self.coords)

    def key(self):
        j, ys = self.normalized()
        return (j, tuple(y.key() for y in ys))

    def __eq__(self, other):
        if not isinstance(other, ProjectiveTuple):
            return NotImplemented
        return self.n == other.n and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "(" + " : ".join(_short(c) for c in self.coords) + ")"

    def to_json(self) -> list:
        out = []
        for c in self.coords:
            if c.is_rational:
                q = c.as_fraction()
                out.append(str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}")
            else:
                out.append(c.to_json())
        return out

    @classmethod
    def from_json(cls, obj) -> "ProjectiveTuple":
        return cls([AlgebraicNumber.from_json(c) for c in obj])


def _short(c: AlgebraicNumber) -> str:
    if c.is_rational:
        return str(c.as_fraction())
    return f"<{c.minpoly}#{c.index}>"


@lru_cache(maxsize=8192)
def _normalize(coords) -> tuple[int, tuple[AlgebraicNumber, ...]]:
    j = next(i for i, c in enumerate(coords) if not c.is_zero())
    if coords[j].is_rational:
        q = coords[j].as_fraction()
        inv = rational(1 / q)
    else:
        inv = alg_inv(coords[j])
    ys = tuple(rational(1) if i == j else alg_mul(c, inv) for i, c in enumerate(coords))
    return j, ys


def primitive_int_vector(qs: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a nonzero rational vector to coprime integers, first nonzero entry positive."""
    den = 1
    for q in qs:
        den = den * q.denominator // gcd(den, q.denominator)
    ints = [int(q * den) for q in qs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    first = next(v for v in ints if v != 0)
    s = 1 if first > 0 else -1
    return tuple(s * v // g for v in ints)


@dataclass(frozen=True)
class PointOrbit:
    """Galois orbit of a projective point.

    ``members[s][i]`` is the canonical conjugate index of ratio ``i`` in the
    ``s``-th orbit element (0 for rational ratios).
    """

    n: int
    anchor: int
    ratios: tuple
    members: tuple

    @property
    def size(self) -> int:
        return len(self.members)

    def member_balls(self, prec: int) -> list[tuple]:
        balls = [y.conjugate_balls(prec) for y in self.ratios]
        return [tuple(balls[i][m[i]] for i in range(self.n + 1)) for m in self.members]

    def representative(self) -> ProjectiveTuple:
        return ProjectiveTuple(self.ratios)


def _separator(ys, alg_idx, attempt):
    cs = [(attempt + 2) ** t if attempt else t + 1 for t in range(len(alg_idx))]
    theta = rational(0)
    for c, i in zip(cs, alg_idx):
        theta = alg_add(theta, alg_mul(rational(c), ys[i]))
    return theta, cs


def point_orbit(P: ProjectiveTuple) -> PointOrbit:
    return _orbit_cached(P)


@lru_cache(maxsize=2048)
def _orbit_cached(P: ProjectiveTuple) -> PointOrbit:
    j, ys = P.normalized()
    n = P.n
    alg_idx = [i for i, y in enumerate(ys) if not y.is_rational]
    if not alg_idx:
        return PointOrbit(n, j, ys, ((0,) * (n + 1),))
    total = 1
    for i in alg_idx:
        total *= ys[i].degree
    if total > MAX_TUPLES:
        raise ResourceError(f"conjugate product set of size {total} exceeds cap {MAX_TUPLES}")
    for attempt in range(SEPARATOR_ATTEMPTS):
        theta, cs = _separator(ys, alg_idx, attempt)
        if theta.degree > MAX_DEGREE:
            raise ResourceError("separating element degree exceeds cap")
        members = _match_orbit(ys, alg_idx, theta, cs, n)
        if members is not None:
            return PointOrbit(n, j, ys, members)
    raise ResourceError("no separating combination found for the orbit")


def _match_orbit(ys, alg_idx, theta, cs, n):
    prec = 128
    while prec <= 2048:
        conj = [ys[i].conjugate_balls(prec) for i in alg_idx]
        with working_precision(prec):
            sums = []
            for idx in itertools.product(*(range(len(c)) for c in conj)):
                s = acb(0)
                for t, k in enumerate(idx):
                    s += cs[t] * conj[t][k]
                sums.append((idx, s))
        roots = theta.conjugate_balls(prec) if not theta.is_rational else (theta.enclosure(prec),)
        found = []
        ambiguous = False
        for r in roots:
            hits = [idx for idx, s in sums if s.overlaps(r)]
            if not hits:
                raise RuntimeError("separating element conjugate matches no tuple")
            if len(hits) > 1:
                ambiguous = True
                break
            found.append(hits[0])
        if not ambiguous and len(set(found)) == len(found):
            members = []
            for idx in found:
                full = [0] * (n + 1)
                for t, i in enumerate(alg_idx):
                    full[i] = idx[t]
                members.append(tuple(full))
            return tuple(sorted(members))
        prec *= 2
    return None


# ---------------------------------------------------------------------------
# integral linear-form products (Chow forms of point orbits)


def _monomials(n: int, k: int):
    for c in itertools.combinations_with_replacement(range(n + 1), k):
        e = [0] * (n + 1)
        for i in c:
            e[i] += 1
        yield tuple(e)


def normalize_terms(terms: dict) -> dict:
    """Divide by content; make the first term in descending lex order positive."""
    terms = {e: int(c) for e, c in terms.items() if c != 0}
    if not terms:
        return terms
    g = 0
    for c in terms.values():
        g = gcd(g, c)
    lead = terms[max(terms)]
    s = 1 if lead > 0 else -1
    return {e: s * c // g for e, c in terms.items()}


@lru_cache(maxsize=2048)
def orbit_chow_terms(orbit: PointOrbit) -> tuple:
    """Primitive integer coefficients of prod_orbit (sum_i u_i tau_i), as sorted (exp, coeff) pairs."""
    n, k = orbit.n, orbit.size
    if k == 1 and all(y.is_rational for y in orbit.ratios):
        v = primitive_int_vector([y.as_fraction() for y in orbit.ratios])
        terms = {}
        for i, c in enumerate(v):
            if c:
                e = [0] * (n + 1)
                e[i] = 1
                terms[tuple(e)] = c
        return tuple(sorted(normalize_terms(terms).items()))
    from math import comb

    if comb(n + k, n) > MAX_MONOMIALS:
        raise ResourceError("Chow form has too many monomials")
    den = 1
    for y in orbit.ratios:
        if y.is_rational:
            den = den * y.as_fraction().denominator // gcd(den, y.as_fraction().denominator)
        else:
            den *= y.minpoly.leading
    scale = fmpz(den) ** k
    # rough size estimate to choose the working precision
    balls = orbit.member_balls(128)
    est = log2(max(den, 1)) * k + 8 * k
    for tau in balls:
        est += log2(1 + sum(abs(complex(t)) for t in tau))
    prec = max(128, int(est) + 64)
    while prec <= 1 << 16:
        res = _expand(orbit, prec, scale)
        if res is not None:
            return tuple(sorted(normalize_terms(res).items()))
        prec *= 2
    raise ResourceError("Chow form coefficients did not round to integers")


def _expand(orbit: PointOrbit, prec: int, scale: fmpz):
    n = orbit.n
    with working_precision(prec):
        poly = {(0,) * (n + 1): acb(1)}
        for tau in orbit.member_balls(prec):
            nxt = {}
            for e, c in poly.items():
                for i in range(n + 1):
                    if tau[i] == 0:
                        continue
                    f = list(e)
                    f[i] += 1
                    f = tuple(f)
                    term = c * tau[i]
                    nxt[f] = nxt[f] + term if f in nxt else term
            poly = nxt
        out = {}
        for e, c in poly.items():
            z = c * scale
            if not z.imag.contains(0):
                return None
            v = z.real.unique_fmpz()
            if v is None:
                return None
            if v != 0:
                out[e] = int(v)
    return out


def orbit_lead(orbit: PointOrbit, terms: tuple | None = None) -> int:
    """Coefficient of u_anchor^k in the primitive Chow form."""
    if terms is None:
        terms = orbit_chow_terms(orbit)
    e = [0] * (orbit.n + 1)
    e[orbit.anchor] = orbit.size
    return dict(terms)[tuple(e)]
