"""Certified real numbers as (midpoint, radius) pairs.

Internally every computation runs on flint ``arb`` balls.  At the public API
boundary a ball is frozen into a :class:`CertifiedValue`, whose midpoint and
radius are exact decimals.  Conversion rounds outward, so the enclosure
survives, and serialization is lossless (``to_json``/``from_json`` round-trip
byte-identically).
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction

from flint import arb, ctx, fmpq, fmpz

DEFAULT_PRECISION_BITS = int(os.environ.get("NKIT_PRECISION_BITS", "128"))

# significant digits kept for a frozen midpoint / radius
MID_DIGITS = 40
RAD_DIGITS = 3

_EXACT = Context(prec=100000)


def default_precision() -> int:
    return DEFAULT_PRECISION_BITS


def set_default_precision(bits: int) -> None:
    global DEFAULT_PRECISION_BITS
    if bits < 32:
        raise ValueError("precision must be at least 32 bits")
    DEFAULT_PRECISION_BITS = int(bits)


@contextmanager
def working_precision(bits: int):
    """Run flint ball arithmetic at ``bits`` of precision (restored on exit)."""
    old = ctx.prec
    ctx.prec = max(int(bits), 32)
    try:
        yield
    finally:
        ctx.prec = old


def _dyadic_to_decimal(man, exp) -> Decimal:
    man = int(man)
    exp = int(exp)
    if exp >= 0:
        return Decimal(man << exp)
    return _EXACT.multiply(Decimal(man * 5 ** (-exp)), Decimal(1).scaleb(exp))


def _arb_mid_rad(x: arb) -> tuple[Decimal, Decimal]:
    mid = x.mid()
    rad = x.rad()
    m, e = mid.man_exp()
    r, f = rad.man_exp()
    return _dyadic_to_decimal(m, e), _dyadic_to_decimal(r, f)


def _round_sig(x: Decimal, digits: int, rounding) -> Decimal:
    if x == 0:
        return Decimal(0)
    c = Context(prec=digits, rounding=rounding)
    return c.plus(x)


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, fmpz)):
        return Fraction(int(x))
    if isinstance(x, fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def to_arb(x) -> arb:
    """Exact (or correctly enclosed) ball for a Python/flint number."""
    if isinstance(x, arb):
        return x
    if isinstance(x, CertifiedValue):
        return x.ball()
    if isinstance(x, (int, fmpz)):
        return arb(fmpz(int(x)))
    if isinstance(x, fmpq):
        return arb(x)
    if isinstance(x, Fraction):
        return arb(fmpq(x.numerator, x.denominator))
    if isinstance(x, float):
        return arb(x)
    if isinstance(x, Decimal):
        return arb(str(x))
    raise TypeError(f"cannot convert {type(x).__name__} to arb")


@dataclass(frozen=True)
class CertifiedValue:
    """A real number known to lie in ``[mid - rad, mid + rad]``.

    ``rigorous`` is False for values whose radius is an empirical error
    estimate (quadrature, sampling) rather than a proven bound.
    """

    mid: Decimal
    rad: Decimal
    rigorous: bool = True

    def __post_init__(self):
        if self.rad < 0:
            raise ValueError("radius must be non-negative")

    @classmethod
    def from_arb(cls, x: arb, rigorous: bool = True, digits: int = MID_DIGITS) -> "CertifiedValue":
        if not x.is_finite():
            raise ValueError(f"ball is not finite: {x}")
        mid, rad = _arb_mid_rad(x)
        rmid = _round_sig(mid, digits, ROUND_HALF_EVEN)
        slack = abs(_EXACT.subtract(mid, rmid))
        rrad = _round_sig(_EXACT.add(rad, slack), RAD_DIGITS, ROUND_CEILING)
        return cls(rmid, rrad, rigorous)

    @classmethod
    def exact(cls, x) -> "CertifiedValue":
        q = to_fraction(x)
        d = Decimal(q.numerator) / Decimal(q.denominator)
        if Fraction(d) == q:
            return cls(d, Decimal(0))
        return cls.from_arb(to_arb(q))

    def ball(self) -> arb:
        """The enclosure as an ``arb`` (at the current working precision)."""
        m = arb(str(self.mid))
        return arb(m.mid(), m.rad() + arb(str(self.rad)).upper())

    @property
    def lower(self) -> Decimal:
        return _EXACT.subtract(self.mid, self.rad)

    @property
    def upper(self) -> Decimal:
        return _EXACT.add(self.mid, self.rad)

    def __float__(self) -> float:
        return float(self.mid)

    def contains(self, x, slack=0) -> bool:
        q = to_fraction(x) if not isinstance(x, float) else Fraction(x)
        s = Fraction(slack)
        return Fraction(self.lower) - s <= q <= Fraction(self.upper) + s

    def overlaps(self, other: "CertifiedValue", slack=0) -> bool:
        s = Fraction(slack)
        lo, hi = Fraction(self.lower), Fraction(self.upper)
        return lo - s <= Fraction(other.upper) and Fraction(other.lower) - s <= hi

    def to_json(self) -> dict:
        out = {"mid": _fmt(self.mid), "rad": _fmt(self.rad)}
        if not self.rigorous:
            out["rigorous"] = False
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "CertifiedValue":
        return cls(Decimal(obj["mid"]), Decimal(obj["rad"]), bool(obj.get("rigorous", True)))

    def render(self) -> str:
        """Decimal string carrying only the digits the radius justifies."""
        return render_digits(self.mid, self.rad)

    def __str__(self) -> str:
        return f"{self.render()} (+/- {_fmt(self.rad)})"


def _fmt(d: Decimal) -> str:
    s = format(d, "E") if (d != 0 and (abs(d) < Decimal("1e-6") or abs(d) >= Decimal("1e21"))) else format(d, "f")
    return s


def render_digits(mid: Decimal, rad: Decimal) -> str:
    if rad == 0:
        return _fmt(mid.normalize()) if mid != 0 else "0"
    # keep decimals down to the first digit of the radius
    lead = rad.adjusted()
    q = Decimal(1).scaleb(lead)
    rounded = _EXACT.quantize(mid, q)
    if lead >= 0:
        return format(_EXACT.quantize(rounded, Decimal(1)), "f")
    return format(rounded, "f")


def cv(x: arb, rigorous: bool = True) -> CertifiedValue:
    return CertifiedValue.from_arb(x, rigorous)


def arb_log2() -> arb:
    return arb(2).log()


def log_int(n) -> arb:
    n = abs(int(n))
    if n == 0:
        raise ValueError("log of zero")
    return arb(fmpz(n)).log()


def upper_float(x: arb) -> float:
    """A float >= every point of the ball."""
    import math

    u = float(x.upper())
    return math.nextafter(u, math.inf)
