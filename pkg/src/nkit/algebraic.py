"""Exact algebraic numbers: minimal polynomial plus an isolating box.

An :class:`AlgebraicNumber` is the ``index``-th root of an irreducible,
primitive integer polynomial, where roots are ordered lexicographically by
(real, imaginary) part of their certified enclosures at ``ORDER_PREC`` bits.
The stored ``region`` is the rational box of that enclosure; it contains
exactly one root of the minimal polynomial.

Sums and products are computed from power sums of the roots (composed sum /
composed product), the result polynomial is factored, and the factor holding
the target value is certified by ball overlap at increasing precision.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Callable, Iterable, Sequence

from flint import acb, arb, fmpq, fmpz, fmpz_poly

from .certified import CertifiedValue, to_fraction, working_precision
from .errors import DivisionByZero, DomainError, ResourceError

ORDER_PREC = 128
MAX_DEGREE = 512
MAX_PREC = 1 << 16


# ---------------------------------------------------------------------------
# integer polynomials


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients lowest degree first.

    Trailing zeros are stripped, so the zero polynomial is ``coeffs == ()``.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self):
        cs = [int(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_flint(cls, p: fmpz_poly) -> "IntPolynomial":
        return cls(tuple(int(c) for c in p.coeffs()))

    @classmethod
    def from_rational(cls, coeffs: Iterable) -> "IntPolynomial":
        """Clear denominators of rational coefficients (result is primitive)."""
        qs = [to_fraction(c) for c in coeffs]
        den = 1
        for q in qs:
            den = den * q.denominator // gcd(den, q.denominator)
        return cls(tuple(int(q * den) for q in qs)).primitive()

    def to_flint(self) -> fmpz_poly:
        return fmpz_poly(list(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    @property
    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    @property
    def content_normalized(self) -> bool:
        return bool(self.coeffs) and self.content == 1 and self.leading > 0

    def primitive(self) -> "IntPolynomial":
        if not self.coeffs:
            return self
        g = self.content
        s = 1 if self.leading > 0 else -1
        return IntPolynomial(tuple(s * c // g for c in self.coeffs))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial.from_flint(self.to_flint() * other.to_flint())

    def __str__(self) -> str:
        return str(self.to_flint())

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, obj) -> "IntPolynomial":
        return cls(tuple(int(c) for c in obj))


def as_flint(p) -> fmpz_poly:
    if isinstance(p, fmpz_poly):
        return p
    if isinstance(p, IntPolynomial):
        return p.to_flint()
    return fmpz_poly([int(c) for c in p])


def _primitive_flint(p: fmpz_poly) -> fmpz_poly:
    c = p.content()
    if c != 1 and c != 0:
        p = fmpz_poly([x // c for x in p.coeffs()])
    if p.degree() >= 0 and p.coeffs()[-1] < 0:
        p = -p
    return p


def irreducible_factors(p) -> list[fmpz_poly]:
    """Distinct primitive irreducible factors (positive leading coefficient)."""
    p = as_flint(p)
    if p.degree() > MAX_DEGREE:
        raise ResourceError(f"degree {p.degree()} exceeds factorization cap {MAX_DEGREE}")
    _, facs = p.factor()
    return [_primitive_flint(f) for f, _ in facs if f.degree() >= 1]


# ---------------------------------------------------------------------------
# certified roots


def _mid_fraction(x: arb) -> Fraction:
    m, e = x.mid().man_exp()
    m, e = int(m), int(e)
    return Fraction(m << e) if e >= 0 else Fraction(m, 1 << -e)


def _order_key(z: acb):
    return (_mid_fraction(z.real), _mid_fraction(z.imag))


@lru_cache(maxsize=8192)
def _raw_roots(coeffs: tuple, prec: int) -> tuple:
    with working_precision(prec):
        rts = fmpz_poly(list(coeffs)).complex_roots()
    return tuple(r for r, _ in rts)


@lru_cache(maxsize=8192)
def canonical_roots(coeffs: tuple) -> tuple:
    """Isolating enclosures of the roots of a squarefree polynomial, in canonical order."""
    return tuple(sorted(_raw_roots(coeffs, ORDER_PREC), key=_order_key))


@lru_cache(maxsize=8192)
def root_balls(coeffs: tuple, prec: int) -> tuple:
    """Root enclosures at ``prec`` bits, listed in canonical order."""
    canon = canonical_roots(coeffs)
    if prec <= ORDER_PREC:
        return canon
    p = prec
    while p <= MAX_PREC:
        fine = _raw_roots(coeffs, p)
        out = []
        for c in canon:
            hits = [r for r in fine if r.overlaps(c)]
            if len(hits) != 1:
                break
            out.append(hits[0])
        else:
            return tuple(out)
        p *= 2
    raise ResourceError("could not match root enclosures to canonical order")


def _box(z: acb) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    re, im = z.real, z.imag
    rm, rr = _mid_fraction(re), _mid_fraction(re.rad())
    im_, ir = _mid_fraction(im), _mid_fraction(im.rad())
    return (rm - rr, rm + rr, im_ - ir, im_ + ir)


def _box_acb(box) -> acb:
    re_lo, re_hi, im_lo, im_hi = box
    re = arb(fmpq((re_lo + re_hi).numerator, (re_lo + re_hi).denominator) / 2,
             arb(fmpq((re_hi - re_lo).numerator, (re_hi - re_lo).denominator) / 2).upper())
    im = arb(fmpq((im_lo + im_hi).numerator, (im_lo + im_hi).denominator) / 2,
             arb(fmpq((im_hi - im_lo).numerator, (im_hi - im_lo).denominator) / 2).upper())
    return acb(re, im)


# ---------------------------------------------------------------------------
# algebraic numbers


@dataclass(frozen=True, eq=False)
class AlgebraicNumber:
    minpoly: IntPolynomial
    index: int
    region: tuple

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    @property
    def is_rational(self) -> bool:
        return self.minpoly.degree == 1

    def is_zero(self) -> bool:
        return self.minpoly.coeffs == (0, 1)

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise DomainError("not a rational number")
        a0, a1 = self.minpoly.coeffs
        return Fraction(-a0, a1)

    def is_real(self) -> bool:
        if self.is_rational:
            return True
        return canonical_roots(self.minpoly.coeffs)[self.index].imag.is_zero()

    def enclosure(self, prec: int = ORDER_PREC) -> acb:
        if self.is_rational:
            q = self.as_fraction()
            return acb(fmpq(q.numerator, q.denominator))
        return root_balls(self.minpoly.coeffs, prec)[self.index]

    def conjugate_balls(self, prec: int = ORDER_PREC) -> tuple:
        if self.is_rational:
            return (self.enclosure(prec),)
        return root_balls(self.minpoly.coeffs, prec)

    def key(self):
        return (self.minpoly.coeffs, self.index)

    def __eq__(self, other):
        if not isinstance(other, AlgebraicNumber):
            if isinstance(other, (int, Fraction)):
                return self.is_rational and self.as_fraction() == other
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.is_rational:
            return f"AlgebraicNumber({self.as_fraction()})"
        z = self.enclosure(64)
        return f"AlgebraicNumber({self.minpoly}, #{self.index} ~ {complex(z)})"

    # arithmetic sugar
    def __add__(self, other):
        return alg_add(self, coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return alg_neg(self)

    def __sub__(self, other):
        return alg_add(self, alg_neg(coerce(other)))

    def __rsub__(self, other):
        return alg_add(coerce(other), alg_neg(self))

    def __mul__(self, other):
        return alg_mul(self, coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return alg_mul(self, alg_inv(coerce(other)))

    def __rtruediv__(self, other):
        return alg_mul(coerce(other), alg_inv(self))

    def __pow__(self, k: int):
        if k < 0:
            return alg_pow(alg_inv(self), -k)
        return alg_pow(self, k)

    def to_json(self) -> dict:
        re_lo, re_hi, im_lo, im_hi = _compact_region(self)
        return {
            "minpoly": self.minpoly.to_json(),
            "root": {"re": [_qstr(re_lo), _qstr(re_hi)], "im": [_qstr(im_lo), _qstr(im_hi)]},
        }

    @classmethod
    def from_json(cls, obj) -> "AlgebraicNumber":
        if isinstance(obj, (int, str)):
            return rational(Fraction(obj))
        p = IntPolynomial.from_json(obj["minpoly"])
        if "index" in obj:
            return root_of(p, int(obj["index"]))
        box = tuple(Fraction(s) for s in (*obj["root"]["re"], *obj["root"]["im"]))
        return root_in_box(p, box)


def _round_out(lo: Fraction, hi: Fraction, k: int):
    from math import ceil, floor

    if lo == hi:
        return lo, hi
    return Fraction(floor(lo * 2**k), 2**k), Fraction(ceil(hi * 2**k), 2**k)


def _compact_region(a: "AlgebraicNumber"):
    """A short dyadic box around the root that still isolates it."""
    if a.is_rational:
        return a.region
    re_lo, re_hi, im_lo, im_hi = a.region
    width = max(re_hi - re_lo, im_hi - im_lo)
    others = [z for i, z in enumerate(canonical_roots(a.minpoly.coeffs)) if i != a.index]
    k = 4
    while Fraction(1, 2**k) > width / 4 and k < 400:
        box = (*_round_out(re_lo, re_hi, k), *_round_out(im_lo, im_hi, k))
        target = _box_acb(box)
        if not any(z.overlaps(target) for z in others):
            return box
        k += 4
    return a.region


def _qstr(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _make(f: fmpz_poly, index: int) -> AlgebraicNumber:
    poly = IntPolynomial.from_flint(f)
    if poly.degree == 1:
        a0, a1 = poly.coeffs
        q = Fraction(-a0, a1)
        return AlgebraicNumber(poly, 0, (q, q, Fraction(0), Fraction(0)))
    z = canonical_roots(poly.coeffs)[index]
    return AlgebraicNumber(poly, index, _box(z))


def rational(q) -> AlgebraicNumber:
    q = to_fraction(q)
    return _make(fmpz_poly([-q.numerator, q.denominator]), 0)


def coerce(x) -> AlgebraicNumber:
    if isinstance(x, AlgebraicNumber):
        return x
    if isinstance(x, (int, Fraction, fmpz, fmpq)):
        return rational(x)
    raise TypeError(f"cannot interpret {x!r} as an algebraic number")


ZERO = None  # set below


def _identify(poly: fmpz_poly, approx: Callable[[int], acb]) -> AlgebraicNumber:
    """Pick the root of ``poly`` that ``approx`` converges to, with certification.

    ``approx(prec)`` must return a ball containing the target value whose
    radius shrinks as ``prec`` grows.
    """
    factors = irreducible_factors(poly)
    prec = 64
    while prec <= MAX_PREC:
        target = approx(prec)
        hits = []
        for f in factors:
            coeffs = tuple(int(c) for c in f.coeffs())
            if f.degree() == 1:
                q = Fraction(-coeffs[0], coeffs[1])
                if target.overlaps(acb(fmpq(q.numerator, q.denominator))):
                    hits.append((f, 0))
                continue
            balls = root_balls(coeffs, max(prec, ORDER_PREC))
            for i, r in enumerate(balls):
                if r.overlaps(target):
                    hits.append((f, i))
        if len(hits) == 1:
            f, i = hits[0]
            return _make(f, i)
        if not hits:
            raise RuntimeError("target value is not a root of the candidate polynomial")
        prec *= 2
    raise ResourceError("root identification did not certify within the precision cap")


def root_of(p, selector: int) -> AlgebraicNumber:
    """The ``selector``-th distinct root of ``p`` in (real, imag) lexicographic order."""
    p = as_flint(p)
    if p.degree() < 1:
        raise DomainError("root_of needs a polynomial of degree >= 1")
    entries = []
    for f in irreducible_factors(p):
        coeffs = tuple(int(c) for c in f.coeffs())
        if f.degree() == 1:
            q = Fraction(-coeffs[0], coeffs[1])
            entries.append(((q, Fraction(0)), f, 0))
        else:
            for i, z in enumerate(canonical_roots(coeffs)):
                entries.append((_order_key(z), f, i))
    entries.sort(key=lambda e: e[0])
    if not 0 <= selector < len(entries):
        raise IndexError(f"root selector {selector} out of range for {len(entries)} roots")
    _, f, i = entries[selector]
    return _make(f, i)


def roots_of(p) -> list[AlgebraicNumber]:
    p = as_flint(p)
    n = sum(f.degree() for f in irreducible_factors(p))
    return [root_of(p, i) for i in range(n)]


def root_in_box(p, box) -> AlgebraicNumber:
    """The unique root of ``p`` inside the rational box (re_lo, re_hi, im_lo, im_hi)."""
    target = _box_acb(box)
    re_lo, re_hi, im_lo, im_hi = box
    for f in irreducible_factors(p):
        coeffs = tuple(int(c) for c in f.coeffs())
        if f.degree() == 1:
            q = Fraction(-coeffs[0], coeffs[1])
            if re_lo <= q <= re_hi and im_lo <= 0 <= im_hi:
                return _make(f, 0)
            continue
        prec = ORDER_PREC
        while prec <= MAX_PREC:
            balls = root_balls(coeffs, prec)
            hits = [i for i, r in enumerate(balls) if r.overlaps(target)]
            inside = [i for i in hits if target.contains(balls[i])]
            if len(hits) == 1 and inside:
                return _make(f, hits[0])
            if not hits:
                break
            prec *= 2
        else:
            raise ResourceError("box does not isolate a root")
    raise DomainError("no root of the polynomial in the given box")


# ---------------------------------------------------------------------------
# power sums, composed sums and products


def power_sums(p: fmpz_poly, count: int) -> list[fmpq]:
    """s_0..s_count of the roots of ``p`` (with multiplicity) via Newton's identities."""
    a = [fmpz(c) for c in p.coeffs()]
    d = len(a) - 1
    s = [fmpq(d)]
    lead = a[d]
    for k in range(1, count + 1):
        acc = fmpq(k * a[d - k]) if k <= d else fmpq(0)
        for i in range(1, min(k - 1, d) + 1):
            acc += a[d - i] * s[k - i]
        s.append(-acc / lead)
    return s


def poly_from_power_sums(s: Sequence[fmpq]) -> fmpz_poly:
    """Primitive integer polynomial whose roots have power sums ``s`` (s[0] = degree)."""
    n = int(s[0])
    e = [fmpq(1)]
    for k in range(1, n + 1):
        acc = fmpq(0)
        for i in range(1, k + 1):
            term = e[k - i] * s[i]
            acc = acc + term if i % 2 == 1 else acc - term
        e.append(acc / k)
    # x^n - e1 x^{n-1} + e2 x^{n-2} - ...
    coeffs = [fmpq(0)] * (n + 1)
    for k in range(n + 1):
        coeffs[n - k] = e[k] if k % 2 == 0 else -e[k]
    den = fmpz(1)
    for c in coeffs:
        den = den.lcm(c.q) if hasattr(den, "lcm") else den * c.q // fmpz(gcd(int(den), int(c.q)))
    ints = [int(c.p * (den // c.q)) for c in coeffs]
    return _primitive_flint(fmpz_poly(ints))


def composed_sum(p: fmpz_poly, q: fmpz_poly) -> fmpz_poly:
    """Polynomial with roots r + t over all roots r of p and t of q."""
    n = p.degree() * q.degree()
    sp, sq = power_sums(p, n), power_sums(q, n)
    out = [fmpq(n)]
    for k in range(1, n + 1):
        acc = fmpq(0)
        for i in range(k + 1):
            acc += comb(k, i) * sp[i] * sq[k - i]
        out.append(acc)
    return poly_from_power_sums(out)


def composed_product(p: fmpz_poly, q: fmpz_poly) -> fmpz_poly:
    """Polynomial with roots r * t over all roots r of p and t of q (no zero roots)."""
    n = p.degree() * q.degree()
    sp, sq = power_sums(p, n), power_sums(q, n)
    return poly_from_power_sums([fmpq(n)] + [sp[k] * sq[k] for k in range(1, n + 1)])


def _check_degree(n: int):
    if n > MAX_DEGREE:
        raise ResourceError(f"result degree {n} exceeds cap {MAX_DEGREE}")


def _shift_poly(p: fmpz_poly, q: Fraction) -> fmpz_poly:
    """Primitive polynomial whose roots are those of p shifted by +q."""
    u, v = q.numerator, q.denominator
    # v^d p((v x - u)/v)
    lin = fmpz_poly([-u, v])
    d = p.degree()
    acc = fmpz_poly([0])
    for i, a in enumerate(p.coeffs()):
        acc += a * lin ** i * fmpz(v) ** (d - i)
    return _primitive_flint(acc)


def _scale_poly(p: fmpz_poly, q: Fraction) -> fmpz_poly:
    """Primitive polynomial whose roots are those of p multiplied by q != 0."""
    u, v = q.numerator, q.denominator
    d = p.degree()
    return _primitive_flint(fmpz_poly([a * fmpz(v) ** i * fmpz(u) ** (d - i) for i, a in enumerate(p.coeffs())]))


def alg_neg(a: AlgebraicNumber) -> AlgebraicNumber:
    f = a.minpoly.to_flint()
    g = fmpz_poly([c if i % 2 == 0 else -c for i, c in enumerate(f.coeffs())])
    return _identify(g, lambda prec: -a.enclosure(prec))


def alg_conj(a: AlgebraicNumber) -> AlgebraicNumber:
    """Complex conjugate (same minimal polynomial)."""
    if a.is_real():
        return a
    return _identify(a.minpoly.to_flint(), lambda prec: a.enclosure(prec).conjugate())


def alg_add(a: AlgebraicNumber, b: AlgebraicNumber) -> AlgebraicNumber:
    a, b = coerce(a), coerce(b)
    if a.is_rational and b.is_rational:
        return rational(a.as_fraction() + b.as_fraction())
    if b.is_rational:
        a, b = b, a
    if a.is_rational:
        q = a.as_fraction()
        if q == 0:
            return b
        poly = _shift_poly(b.minpoly.to_flint(), q)
    else:
        _check_degree(a.degree * b.degree)
        poly = composed_sum(a.minpoly.to_flint(), b.minpoly.to_flint())
    return _identify(poly, lambda prec: a.enclosure(prec) + b.enclosure(prec))


def alg_mul(a: AlgebraicNumber, b: AlgebraicNumber) -> AlgebraicNumber:
    a, b = coerce(a), coerce(b)
    if a.is_zero() or b.is_zero():
        return rational(0)
    if a.is_rational and b.is_rational:
        return rational(a.as_fraction() * b.as_fraction())
    if b.is_rational:
        a, b = b, a
    if a.is_rational:
        q = a.as_fraction()
        if q == 1:
            return b
        poly = _scale_poly(b.minpoly.to_flint(), q)
    else:
        _check_degree(a.degree * b.degree)
        poly = composed_product(a.minpoly.to_flint(), b.minpoly.to_flint())
    return _identify(poly, lambda prec: a.enclosure(prec) * b.enclosure(prec))


def alg_inv(a: AlgebraicNumber) -> AlgebraicNumber:
    a = coerce(a)
    if a.is_zero():
        raise DivisionByZero("inverse of zero")
    if a.is_rational:
        return rational(1 / a.as_fraction())
    rev = fmpz_poly(list(reversed(a.minpoly.to_flint().coeffs())))
    return _identify(rev, lambda prec: 1 / a.enclosure(prec))


def alg_pow(a: AlgebraicNumber, k: int) -> AlgebraicNumber:
    a = coerce(a)
    if k < 0:
        return alg_pow(alg_inv(a), -k)
    if k == 0:
        return rational(1)
    if a.is_rational:
        return rational(a.as_fraction() ** k)
    d = a.degree
    s = power_sums(a.minpoly.to_flint(), d * k)
    poly = poly_from_power_sums([fmpq(d)] + [s[j * k] for j in range(1, d + 1)])
    return _identify(poly, lambda prec: a.enclosure(prec) ** k)


def alg_root(a: AlgebraicNumber, k: int) -> AlgebraicNumber:
    """Principal k-th root exp(log(a)/k)."""
    a = coerce(a)
    if k < 1:
        raise DomainError("root order must be positive")
    if a.is_zero() or k == 1:
        return a
    f = a.minpoly.to_flint()
    _check_degree(f.degree() * k)
    coeffs = [0] * (f.degree() * k + 1)
    for i, c in enumerate(f.coeffs()):
        coeffs[i * k] = c

    def approx(prec):
        with working_precision(prec + 16):
            z = a.enclosure(prec)
            if z.imag.is_zero() and z.real > 0:
                return acb(z.real.root(k))
            return (z.log() / k).exp()

    return _identify(fmpz_poly(coeffs), approx)


def nth_root(q, d: int) -> AlgebraicNumber:
    """Positive real d-th root of a positive rational."""
    q = to_fraction(q)
    if q <= 0:
        raise DomainError("nth_root needs a positive rational")
    if d < 1:
        raise DomainError("root order must be positive")
    coeffs = [-q.numerator] + [0] * (d - 1) + [q.denominator]

    def approx(prec):
        with working_precision(prec + 16):
            return acb(arb(fmpq(q.numerator, q.denominator)).root(d))

    return _identify(fmpz_poly(coeffs), approx)


def dickson(j: int) -> fmpz_poly:
    """D_j with D_j(x + 1/x) = x^j + x^-j."""
    d0, d1 = fmpz_poly([2]), fmpz_poly([0, 1])
    if j == 0:
        return d0
    x = fmpz_poly([0, 1])
    for _ in range(j - 1):
        d0, d1 = d1, x * d1 - d0
    return d1


def alg_plus_reciprocal(a: AlgebraicNumber) -> AlgebraicNumber:
    """a + 1/a, using the trace polynomial when the minimal polynomial is palindromic."""
    a = coerce(a)
    if a.is_zero():
        raise DivisionByZero("1/0")
    cs = list(a.minpoly.coeffs)
    if a.is_rational or cs != cs[::-1] or len(cs) % 2 == 0:
        return alg_add(a, alg_inv(a))
    m = (len(cs) - 1) // 2
    q = fmpz_poly([cs[m]])
    for j in range(1, m + 1):
        q += cs[m + j] * dickson(j)
    return _identify(q, lambda prec: a.enclosure(prec) + 1 / a.enclosure(prec))


def conjugates(a: AlgebraicNumber, precision=1e-30) -> list[tuple[CertifiedValue, CertifiedValue]]:
    """All conjugates of ``a`` as certified (re, im) pairs with radius <= precision."""
    a = coerce(a)
    target = Fraction(precision)
    if target <= 0:
        raise DomainError("precision must be positive")
    if a.is_rational:
        q = a.as_fraction()
        return [(CertifiedValue.exact(q), CertifiedValue.exact(0))]
    # frozen midpoints need enough significant digits to carry the target radius
    digits = max(40, len(str(target.denominator // max(target.numerator, 1))) + 8)
    prec = ORDER_PREC
    while prec <= MAX_PREC:
        balls = root_balls(a.minpoly.coeffs, prec)
        out = [(CertifiedValue.from_arb(z.real, digits=digits), CertifiedValue.from_arb(z.imag, digits=digits))
               for z in balls]
        if all(Fraction(r.rad) <= target and Fraction(i.rad) <= target for r, i in out):
            return out
        prec *= 2
    raise ResourceError("conjugate precision unreachable")


def product_tuples(numbers: Sequence[AlgebraicNumber], prec: int):
    """All tuples of conjugates (as balls) of the given numbers, with their index tuples."""
    balls = [n.conjugate_balls(prec) for n in numbers]
    for idx in itertools.product(*(range(len(b)) for b in balls)):
        yield idx, tuple(b[i] for b, i in zip(balls, idx))
