"""Explicit Northcott thresholds.

Every threshold here has the exact shape a + b log 2 with a, b rational, so
it is stored symbolically and rendered as a certified decimal.  Differences
such as "irreducible variant = threshold - d log 2" are then exact identities
on (a, b), not floating-point comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from flint import arb

from .certified import CertifiedValue, default_precision, to_arb, to_fraction, working_precision
from .chow import c_n
from .dynamics import dyn_constants
from .errors import DomainError


@dataclass(frozen=True)
class LogTwoForm:
    """a + b log 2, exact."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __add__(self, other: "LogTwoForm") -> "LogTwoForm":
        return LogTwoForm(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "LogTwoForm") -> "LogTwoForm":
        return LogTwoForm(self.a - other.a, self.b - other.b)

    def scale(self, k) -> "LogTwoForm":
        k = Fraction(k)
        return LogTwoForm(self.a * k, self.b * k)

    def ball(self, prec: int) -> arb:
        with working_precision(prec):
            return to_arb(self.a) + to_arb(self.b) * arb(2).log()

    def to_json(self) -> dict:
        return {"rational": str(self.a), "log2_coeff": str(self.b)}

    @classmethod
    def from_json(cls, obj) -> "LogTwoForm":
        return cls(Fraction(obj["rational"]), Fraction(obj["log2_coeff"]))


LOG2 = LogTwoForm(Fraction(0), Fraction(1))


def _q(x) -> LogTwoForm:
    return LogTwoForm(to_fraction(x))


@dataclass(frozen=True)
class ThresholdReport:
    theorem: str
    inputs: dict
    exact: LogTwoForm
    threshold: CertifiedValue
    irreducible_exact: LogTwoForm | None = None
    irreducible_variant: CertifiedValue | None = None
    relative_shift: Fraction | None = None
    log10_threshold: CertifiedValue | None = None
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "theorem": self.theorem,
            "inputs": dict(self.inputs),
            "exact": self.exact.to_json(),
            "threshold": self.threshold.to_json(),
            "irreducible_exact": None if self.irreducible_exact is None else self.irreducible_exact.to_json(),
            "irreducible_variant": None if self.irreducible_variant is None else self.irreducible_variant.to_json(),
            "relative_shift": None if self.relative_shift is None else str(self.relative_shift),
        }
        if self.log10_threshold is not None:
            out["log10_threshold"] = self.log10_threshold.to_json()
        if self.extras:
            out["extras"] = self.extras
        return out

    @classmethod
    def from_json(cls, obj) -> "ThresholdReport":
        opt = lambda v, f: None if v is None else f(v)
        return cls(
            obj["theorem"],
            dict(obj["inputs"]),
            LogTwoForm.from_json(obj["exact"]),
            CertifiedValue.from_json(obj["threshold"]),
            opt(obj.get("irreducible_exact"), LogTwoForm.from_json),
            opt(obj.get("irreducible_variant"), CertifiedValue.from_json),
            opt(obj.get("relative_shift"), Fraction),
            opt(obj.get("log10_threshold"), CertifiedValue.from_json),
            dict(obj.get("extras", {})),
        )


def _certify(form: LogTwoForm, prec: int) -> CertifiedValue:
    """Evaluate at prec and 2 prec; the two balls must overlap."""
    lo = form.ball(prec)
    hi = form.ball(2 * prec)
    if not lo.overlaps(hi):
        raise ArithmeticError("threshold evaluation is unstable under precision doubling")
    with working_precision(2 * prec):
        return CertifiedValue.from_arb(hi)


def _log10(form: LogTwoForm, prec: int) -> CertifiedValue:
    with working_precision(prec):
        v = form.ball(prec)
        return CertifiedValue.from_arb(v.log() / arb(10).log())


def _report(theorem, inputs, exact, irreducible_drop, relative, prec, extras=None, log10=False):
    prec = prec or default_precision()
    irr = None if irreducible_drop is None else exact - irreducible_drop
    inputs = {k: v if isinstance(v, dict) else str(v) for k, v in inputs.items()}
    return ThresholdReport(
        theorem,
        inputs,
        exact,
        _certify(exact, prec),
        irr,
        None if irr is None else _certify(irr, prec),
        relative,
        _log10(exact, prec) if log10 else None,
        extras or {},
    )


def _pos_int(name, v, lo=1):
    if not isinstance(v, int) or v < lo:
        raise DomainError(f"{name} must be an integer >= {lo}")


def threshold_proj(n: int, d: int, C, relative_c=None, prec: int | None = None) -> ThresholdReport:
    """d (C + (7/2) n log 2 + c(n) + log 2), plus relative_c if given."""
    _pos_int("n", n)
    _pos_int("d", d)
    if to_fraction(C) <= 0:
        raise DomainError("C must be positive")
    inner = _q(C) + LOG2.scale(Fraction(7, 2) * n) + LogTwoForm(c_n(n)) + LOG2
    exact = inner.scale(d)
    rel = None
    if relative_c is not None:
        rel = to_fraction(relative_c)
        exact = exact + LogTwoForm(rel)
    inputs = {"n": n, "d": d, "C": to_fraction(C)}
    if rel is not None:
        inputs["relative_c"] = rel
    return _report("proj", inputs, exact, LOG2.scale(d), rel, prec)


def proj_constant(n: int) -> LogTwoForm:
    """R = (7/2) n log 2 + c(n) + log 2, so that proj(n, d, C) = main(d, C, R)."""
    return LOG2.scale(Fraction(7, 2) * n) + LogTwoForm(c_n(n)) + LOG2


def threshold_abvar(g: int, d: int, C, h2_theta_zero, n: int, prec: int | None = None) -> ThresholdReport:
    """(d/16) (C + 4^{g+1} h2 + 3 g log 2 + c(n) + log 2); n is the ambient dimension."""
    _pos_int("g", g)
    _pos_int("d", d)
    _pos_int("n", n)
    h2 = to_fraction(h2_theta_zero)
    if h2 < 0:
        raise DomainError("h2_theta_zero must be non-negative")
    inner = _q(C) + LogTwoForm(4 ** (g + 1) * h2) + LOG2.scale(3 * g) + LogTwoForm(c_n(n)) + LOG2
    exact = inner.scale(Fraction(d, 16))
    inputs = {"g": g, "d": d, "C": to_fraction(C), "h2_theta_zero": h2, "n": n}
    return _report("abvar", inputs, exact, LOG2.scale(Fraction(d, 16)), None, prec)


def threshold_dyn(n: int, D: int, d: int, C, h_f, prec: int | None = None) -> ThresholdReport:
    """d (C + C1 h_f + C2 + c(n)); no irreducible variant.

    C2 is an exact integer (astronomical for larger n, D); the threshold is
    kept as an exact rational and rendered together with its log10.
    """
    _pos_int("n", n)
    _pos_int("D", D, 2)
    _pos_int("d", d)
    k = dyn_constants(n, D, prec)
    if k.C2 is None:
        raise DomainError("C2 too large to hold exactly; use dyn_constants for its logarithm")
    exact = (_q(C) + LogTwoForm(k.C1 * to_fraction(h_f)) + LogTwoForm(Fraction(k.C2)) + LogTwoForm(c_n(n))).scale(d)
    inputs = {"n": n, "D": D, "d": d, "C": to_fraction(C), "h_f": to_fraction(h_f)}
    extras = {"C1": str(k.C1), "log_C2": k.log_C2.to_json(), "log10_C2": _log10(LogTwoForm(Fraction(k.C2)), prec or default_precision()).to_json()}
    return _report("dyn", inputs, exact, None, None, prec, extras, log10=True)


def threshold_main(d: int, C, R, prec: int | None = None) -> ThresholdReport:
    """d (C + R) with R >= 0 supplied by the caller (a + b log 2 form or a rational)."""
    _pos_int("d", d)
    Rf = R if isinstance(R, LogTwoForm) else _q(R)
    if Rf.ball(default_precision()) < 0:
        raise DomainError("R must be non-negative")
    exact = (_q(C) + Rf).scale(d)
    inputs = {"d": d, "C": to_fraction(C), "R": Rf.to_json() if isinstance(R, LogTwoForm) else to_fraction(R)}
    return _report("main", inputs, exact, LOG2.scale(d), None, prec)
