"""Chow forms of zero-cycles and plane curves, and Philippon heights.

Conventions: a cycle's height is additive over components (not divided by
D(V)).  The Chow form of a point orbit is the primitive integral product of
the linear forms sum u_i tau_i; the Chow form of a plane curve f is
f(u x v), the curve evaluated at the intersection point of the two lines u
and v (cross product).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from flint import arb, fmpz_mpoly_ctx

from .certified import CertifiedValue, default_precision, log_int, working_precision
from .errors import DomainError
from .heights import ProjectiveTuple
from .orbits import normalize_terms, orbit_chow_terms, orbit_lead, point_orbit

QMC_LOG2_NODES = 20
QMC_ROTATIONS = 8
QMC_CHUNK = 1 << 16


def c_n(n: int) -> Fraction:
    """sum_{i=1}^n 1/(2i)."""
    if n < 1:
        raise DomainError("c_n needs n >= 1")
    return sum((Fraction(1, 2 * i) for i in range(1, n + 1)), Fraction(0))


# ---------------------------------------------------------------------------
# multihomogeneous forms


@dataclass(frozen=True)
class MultiHomogeneousForm:
    """Integer form in ``len(degrees)`` blocks of ``nvars`` variables.

    ``terms`` maps a tuple of per-block exponent tuples to a nonzero integer.
    """

    nvars: int
    degrees: tuple
    terms: tuple  # sorted ((exp_blocks, coeff), ...)

    @classmethod
    def build(cls, nvars: int, degrees, terms: dict, normalize: bool = True) -> "MultiHomogeneousForm":
        for e in terms:
            if len(e) != len(degrees) or any(len(b) != nvars or sum(b) != d for b, d in zip(e, degrees)):
                raise DomainError("term does not match the block structure")
        if normalize:
            flat = {tuple(x for b in e for x in b): c for e, c in terms.items()}
            flat = normalize_terms(flat)
            terms = {_unflatten(k, nvars, len(degrees)): c for k, c in flat.items()}
        terms = {e: int(c) for e, c in terms.items() if c}
        return cls(nvars, tuple(degrees), tuple(sorted(terms.items())))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def max_abs_coeff(self) -> int:
        return max(abs(c) for _, c in self.terms)

    def _ctx(self):
        names = tuple(f"u{b}_{i}" for b in range(len(self.degrees)) for i in range(self.nvars))
        return fmpz_mpoly_ctx.get(names, "lex")

    def to_mpoly(self):
        ctx = self._ctx()
        return ctx.from_dict({tuple(x for b in e for x in b): c for e, c in self.terms})

    def __mul__(self, other: "MultiHomogeneousForm") -> "MultiHomogeneousForm":
        if self.nvars != other.nvars or len(self.degrees) != len(other.degrees):
            raise DomainError("block structures differ")
        p = self.to_mpoly() * other.to_mpoly()
        degs = tuple(a + b for a, b in zip(self.degrees, other.degrees))
        raw = {_unflatten(k, self.nvars, len(degs)): int(c) for k, c in p.to_dict().items()}
        return MultiHomogeneousForm.build(self.nvars, degs, raw)

    def __pow__(self, k: int) -> "MultiHomogeneousForm":
        p = self.to_mpoly() ** k
        degs = tuple(k * d for d in self.degrees)
        raw = {_unflatten(e, self.nvars, len(degs)): int(c) for e, c in p.to_dict().items()}
        return MultiHomogeneousForm.build(self.nvars, degs, raw)

    def evaluate(self, *blocks):
        acc = 0
        for e, c in self.terms:
            t = c
            for b, vals in zip(e, blocks):
                for x, v in zip(b, vals):
                    if x:
                        t = t * v**x
            acc += t
        return acc

    def to_json(self) -> dict:
        return {
            "degrees": list(self.degrees),
            "terms": [{"exp": [list(b) for b in e], "c": str(c)} for e, c in self.terms],
        }

    @classmethod
    def from_json(cls, obj) -> "MultiHomogeneousForm":
        terms = {tuple(tuple(int(x) for x in b) for b in t["exp"]): int(t["c"]) for t in obj["terms"]}
        nvars = len(next(iter(terms))[0])
        return cls.build(nvars, tuple(obj["degrees"]), terms, normalize=False)


def _unflatten(flat, nvars, blocks):
    return tuple(tuple(int(x) for x in flat[b * nvars:(b + 1) * nvars]) for b in range(blocks))


# ---------------------------------------------------------------------------
# cycles


@dataclass(frozen=True)
class PointComponent:
    point: ProjectiveTuple

    @property
    def dim(self) -> int:
        return 0

    @property
    def degree(self) -> int:
        return point_orbit(self.point).size

    def key(self):
        return ("point", chow_form_point_orbit(self.point).terms)

    def to_json(self):
        return {"point": self.point.to_json()}


@dataclass(frozen=True)
class CurveComponent:
    """Plane curve given by an irreducible ternary form {(a, b, c): coeff}."""

    terms: tuple

    @classmethod
    def of(cls, poly: dict) -> "CurveComponent":
        poly = {tuple(int(x) for x in e): int(c) for e, c in poly.items() if c}
        if not poly:
            raise DomainError("zero curve")
        if any(len(e) != 3 for e in poly):
            raise DomainError("plane curves need three variables")
        degs = {sum(e) for e in poly}
        if len(degs) != 1:
            raise DomainError("curve polynomial is not homogeneous")
        if degs.pop() < 1:
            raise DomainError("curve degree must be at least 1")
        poly = normalize_terms(poly)
        p = _ternary_ctx().from_dict(poly)
        _, facs = p.factor()
        if len(facs) != 1 or facs[0][1] != 1:
            raise DomainError("curve polynomial is reducible; pass each factor as a component")
        return cls(tuple(sorted(poly.items())))

    @property
    def dim(self) -> int:
        return 1

    @property
    def degree(self) -> int:
        return sum(self.terms[0][0])

    def as_dict(self) -> dict:
        return dict(self.terms)

    def key(self):
        return ("curve", self.terms)

    def to_json(self):
        return {"curve": [{"exp": list(e), "c": str(c)} for e, c in self.terms]}


@lru_cache(maxsize=1)
def _ternary_ctx():
    return fmpz_mpoly_ctx.get(("x0", "x1", "x2"), "lex")


@dataclass(frozen=True)
class ProjectiveCycle:
    n: int
    components: tuple  # ((mult, component), ...)

    @classmethod
    def of(cls, n: int, components) -> "ProjectiveCycle":
        if n < 1:
            raise DomainError("ambient dimension must be >= 1")
        merged: dict = {}
        order = []
        for mult, comp in components:
            if int(mult) != mult or mult < 1:
                raise DomainError("multiplicities must be positive integers")
            if isinstance(comp, ProjectiveTuple):
                comp = PointComponent(comp)
            if isinstance(comp, PointComponent) and comp.point.n != n:
                raise DomainError("point dimension does not match the cycle")
            if isinstance(comp, CurveComponent) and n != 2:
                raise DomainError("plane curves only live in P^2")
            k = comp.key()
            if k not in merged:
                merged[k] = [0, comp]
                order.append(k)
            merged[k][0] += int(mult)
        if not order:
            raise DomainError("empty cycle")
        dims = {merged[k][1].dim for k in order}
        if len(dims) != 1:
            raise DomainError("cycle mixes components of different dimension")
        return cls(n, tuple((merged[k][0], merged[k][1]) for k in order))

    @property
    def dim(self) -> int:
        return self.components[0][1].dim

    def to_json(self) -> dict:
        comps = []
        for m, c in self.components:
            d = {"mult": m}
            d.update(c.to_json())
            comps.append(d)
        return {"n": self.n, "components": comps}

    @classmethod
    def from_json(cls, obj) -> "ProjectiveCycle":
        comps = []
        for c in obj["components"]:
            if "point" in c:
                comps.append((int(c.get("mult", 1)), PointComponent(ProjectiveTuple.from_json(c["point"]))))
            elif "curve" in c:
                raw = c["curve"]
                if isinstance(raw, dict):
                    poly = {tuple(int(x) for x in k.split(",")): int(v) for k, v in raw.items()}
                else:
                    poly = {tuple(int(x) for x in t["exp"]): int(t["c"]) for t in raw}
                comps.append((int(c.get("mult", 1)), CurveComponent.of(poly)))
            else:
                raise DomainError("component needs 'point' or 'curve'")
        return cls.of(int(obj["n"]), comps)


def big_d(V: ProjectiveCycle) -> int:
    """sum n_i (dim V_i + 1) deg V_i."""
    return sum(m * (c.dim + 1) * c.degree for m, c in V.components)


# ---------------------------------------------------------------------------
# Chow forms


def chow_form_point_orbit(P) -> MultiHomogeneousForm:
    if isinstance(P, PointComponent):
        P = P.point
    if not isinstance(P, ProjectiveTuple):
        P = ProjectiveTuple(P)
    orbit = point_orbit(P)
    terms = {(e,): c for e, c in orbit_chow_terms(orbit)}
    return MultiHomogeneousForm.build(P.n + 1, (orbit.size,), terms, normalize=False)


def chow_form_plane_curve(f) -> MultiHomogeneousForm:
    if not isinstance(f, CurveComponent):
        f = CurveComponent.of(f)
    return _curve_form(f.terms)


@lru_cache(maxsize=256)
def _curve_form(terms) -> MultiHomogeneousForm:
    ctx = fmpz_mpoly_ctx.get(("u0", "u1", "u2", "v0", "v1", "v2"), "lex")
    u0, u1, u2, v0, v1, v2 = ctx.gens()
    w = (u1 * v2 - u2 * v1, u2 * v0 - u0 * v2, u0 * v1 - u1 * v0)
    acc = ctx.from_dict({})
    for (a, b, c), coef in terms:
        acc += coef * w[0] ** a * w[1] ** b * w[2] ** c
    delta = sum(terms[0][0])
    raw = {_unflatten(e, 3, 2): int(c) for e, c in acc.to_dict().items()}
    return MultiHomogeneousForm.build(3, (delta, delta), raw)


def component_form(comp) -> MultiHomogeneousForm:
    if isinstance(comp, PointComponent):
        return chow_form_point_orbit(comp.point)
    return chow_form_plane_curve(comp)


def cycle_chow_form(V: ProjectiveCycle) -> MultiHomogeneousForm:
    """prod f_i^{n_i}, content-normalized."""
    out = None
    for m, comp in V.components:
        f = component_form(comp)
        f = f if m == 1 else f**m
        out = f if out is None else out * f
    return out


# ---------------------------------------------------------------------------
# Philippon heights


@dataclass(frozen=True)
class PhilipponHeightReport:
    h_ph: CertifiedValue
    h_ph_tilde: CertifiedValue
    finite_place_sum: CertifiedValue
    archimedean_integral: CertifiedValue
    correction: Fraction
    D: int
    method: str
    convention: str = "additive"

    def to_json(self) -> dict:
        return {
            "h_ph": self.h_ph.to_json(),
            "h_ph_tilde": self.h_ph_tilde.to_json(),
            "finite_place_sum": self.finite_place_sum.to_json(),
            "archimedean_integral": self.archimedean_integral.to_json(),
            "correction": f"{self.correction.numerator}/{self.correction.denominator}",
            "D": self.D,
            "method": self.method,
            "convention": self.convention,
        }

    @classmethod
    def from_json(cls, obj) -> "PhilipponHeightReport":
        return cls(
            CertifiedValue.from_json(obj["h_ph"]),
            CertifiedValue.from_json(obj["h_ph_tilde"]),
            CertifiedValue.from_json(obj["finite_place_sum"]),
            CertifiedValue.from_json(obj["archimedean_integral"]),
            Fraction(obj["correction"]),
            int(obj["D"]),
            obj["method"],
            obj.get("convention", "additive"),
        )


def _point_integral(P: ProjectiveTuple, n: int, prec: int) -> arb:
    """int log|f_orbit| over the sphere: log|m| + sum (log ||tau||_2 - c(n))."""
    orbit = point_orbit(P)
    m = orbit_lead(orbit)
    cn = c_n(n)
    with working_precision(prec):
        acc = log_int(m)
        for tau in orbit.member_balls(prec):
            acc += sum((abs(t) ** 2 for t in tau), arb(0)).log() / 2
        return acc - orbit.size * arb(cn.numerator) / cn.denominator


def _line_integral(comp: CurveComponent, prec: int) -> arb:
    """int int log|det(a, u, v)| = log ||a||_2 - 1 for a line a.x = 0."""
    a = [0, 0, 0]
    for e, c in comp.terms:
        a[e.index(1)] = c
    with working_precision(prec):
        return arb(sum(x * x for x in a)).log() / 2 - 1


def philippon_height(V: ProjectiveCycle, prec: int | None = None, seed: int = 0) -> PhilipponHeightReport:
    """h_Ph(V) = finite places + archimedean integral + D(V) c(n)."""
    prec = prec or default_precision()
    D = big_d(V)
    cn = c_n(V.n)
    corr = D * cn
    rigorous = True
    method = "closed_form_linear"
    with working_precision(prec):
        integral = arb(0)
        for m, comp in V.components:
            if isinstance(comp, PointComponent):
                integral += m * _point_integral(comp.point, V.n, prec)
            elif comp.degree == 1:
                integral += m * _line_integral(comp, prec)
            else:
                est = qmc_curve_integral(comp, seed=seed)
                integral += m * est.ball()
                rigorous = False
                method = "qmc"
        finite = arb(0)
        h = finite + integral + arb(corr.numerator) / corr.denominator
        tilde = philippon_tilde_ball(V, prec)
        return PhilipponHeightReport(
            CertifiedValue.from_arb(h, rigorous),
            CertifiedValue.from_arb(tilde),
            CertifiedValue.from_arb(finite),
            CertifiedValue.from_arb(integral, rigorous),
            corr,
            D,
            method,
        )


def philippon_tilde_ball(V: ProjectiveCycle, prec: int) -> arb:
    f = cycle_chow_form(V)
    with working_precision(prec):
        return log_int(f.max_abs_coeff())


def philippon_tilde_height(V: ProjectiveCycle, prec: int | None = None) -> CertifiedValue:
    """Finite places (0 for a primitive integral form) plus log of the largest coefficient."""
    return CertifiedValue.from_arb(philippon_tilde_ball(V, prec or default_precision()))


# ---------------------------------------------------------------------------
# quasi-Monte-Carlo sphere integral for curves


def _sphere_points(z: np.ndarray) -> np.ndarray:
    """Map points of [0,1)^4 to the unit sphere of C^3 (one phase fixed).

    |w_i|^2 is uniform on the simplex via (1 - sqrt a, sqrt a (1 - b), sqrt a b);
    the remaining two coordinates get uniform phases.
    """
    r = np.sqrt(z[:, 0])
    w = np.stack([1 - r, r * (1 - z[:, 1]), r * z[:, 1]], axis=1)
    w = np.sqrt(np.maximum(w, 0.0))
    ph = np.exp(2j * np.pi * z[:, 2:4])
    return np.stack([w[:, 0] + 0j, w[:, 1] * ph[:, 0], w[:, 2] * ph[:, 1]], axis=1)


def _eval_ternary(terms, w: np.ndarray) -> np.ndarray:
    acc = np.zeros(w.shape[0], dtype=complex)
    for (a, b, c), coef in terms:
        acc += coef * w[:, 0] ** a * w[:, 1] ** b * w[:, 2] ** c
    return acc


def qmc_curve_integral(comp: CurveComponent, seed: int = 0, log2_nodes: int = QMC_LOG2_NODES,
                       rotations: int = QMC_ROTATIONS) -> CertifiedValue:
    """Estimate int int log|f(u x v)| over two copies of the unit sphere in C^3.

    Each of ``rotations`` estimates uses an independently scrambled Sobol set
    and an independent pair of Haar-random unitary rotations; the value is the
    mean and the radius is 3x the half-range of the estimates (empirical).
    """
    from scipy.stats import qmc, unitary_group

    terms = comp.terms
    ests = []
    for r in range(rotations):
        rng = np.random.default_rng([seed, r])
        U = unitary_group.rvs(3, random_state=rng)
        W = unitary_group.rvs(3, random_state=rng)
        sob = qmc.Sobol(d=8, scramble=True, seed=rng)
        total = 0.0
        count = 0
        remaining = 1 << log2_nodes
        while remaining > 0:
            m = min(QMC_CHUNK, remaining)
            z = sob.random(m)
            u = _sphere_points(z[:, :4]) @ U.T
            v = _sphere_points(z[:, 4:]) @ W.T
            w = np.cross(u, v)
            val = np.abs(_eval_ternary(terms, w))
            val = np.maximum(val, 1e-300)
            total += float(np.sum(np.log(val)))
            count += m
            remaining -= m
        ests.append(total / count)
    mid = float(np.mean(ests))
    half = (max(ests) - min(ests)) / 2
    with working_precision(64):
        return CertifiedValue.from_arb(arb(mid, 3 * half), rigorous=False)
