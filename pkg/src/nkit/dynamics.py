"""Morphisms of P^n, height-gap bounds, and canonical heights.

Morphism check.  With N = (n+1)(D-1)+1 the forms have no common zero iff
every monomial of degree N lies in the span of {mu F_i : deg mu = N - D}
(Macaulay matrix of full row rank).  Solving that system for the pure powers
x_j^N gives an integral identity

    L x_j^N = sum_i G_ij F_i          (L > 0, G_ij integral forms)

which certifies both the morphism property and a lower height bound
h(F(P)) >= D h(P) - log((n+1) T max|G|), T = #monomials of degree N - D.
Primes not dividing L are primes of good reduction.

Canonical heights of rational points use the place-by-place decomposition

    h(F(x)) - D h(x) = sum_v (log |F(x)|_v - D log |x|_v),

where only the archimedean place and primes dividing L contribute.  The
archimedean part is iterated with balls, each p-adic part with p-adic
integers modulo p^M, so iterates never need exact normalization.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import comb, gcd, log2

from flint import arb, fmpq_mat, fmpz, fmpz_mat

from .algebraic import alg_add, alg_mul, rational
from .certified import CertifiedValue, default_precision, log_int, to_arb, to_fraction, working_precision
from .errors import DomainError, NotAMorphism, ResourceError
from .heights import ProjectiveTuple, projective_ball, projective_height
from .orbits import primitive_int_vector

MAX_ITERATIONS = 64
ALGEBRAIC_DEPTH_CAP = 4
ORBIT_BITS_CAP = 4096
C2_EXACT_BITS = 12_000  # keeps str(C2) under the default int-to-str digit limit


def _monomials(nvars: int, deg: int) -> list[tuple]:
    out = []
    for c in itertools.combinations_with_replacement(range(nvars), deg):
        e = [0] * nvars
        for i in c:
            e[i] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def parse_exponent(key) -> tuple:
    if isinstance(key, (tuple, list)):
        return tuple(int(x) for x in key)
    s = str(key).strip().strip("[]()")
    parts = s.replace(";", ",").replace(" ", ",").split(",")
    return tuple(int(p) for p in parts if p != "")


@dataclass(frozen=True)
class ProjectiveSelfMap:
    n: int
    D: int
    forms: tuple  # per form: sorted ((exp, coeff), ...)
    unchecked: bool = False
    certificate: tuple | None = field(default=None, compare=False, repr=False)

    def form_dicts(self) -> list[dict]:
        return [dict(f) for f in self.forms]

    def coefficient_tuple(self) -> list[int]:
        mons = _monomials(self.n + 1, self.D)
        return [dict(f).get(m, 0) for f in self.forms for m in mons]

    def is_power_map(self) -> bool:
        for i, f in enumerate(self.forms):
            if len(f) != 1:
                return False
            e, c = f[0]
            if c != self.forms[0][0][1] or e[i] != self.D:
                return False
        return True

    def __call__(self, x: tuple) -> tuple:
        return tuple(_eval_form(f, x) for f in self.forms)

    def to_json(self) -> dict:
        out = {"forms": [{",".join(map(str, e)): str(c) for e, c in f} for f in self.forms]}
        if self.unchecked:
            out["unchecked"] = True
        return out

    @classmethod
    def from_json(cls, obj) -> "ProjectiveSelfMap":
        if isinstance(obj, dict):
            forms, unchecked = obj["forms"], bool(obj.get("unchecked", False))
        else:
            forms, unchecked = obj, False
        return make_selfmap([{parse_exponent(k): Fraction(str(v)) for k, v in f.items()} for f in forms],
                            unchecked=unchecked)


def _eval_form(form, x):
    acc = 0
    for e, c in form:
        t = c
        for xi, ei in zip(x, e):
            if ei:
                t = t * xi**ei
        acc = acc + t
    return acc


def make_selfmap(forms, unchecked: bool = False) -> ProjectiveSelfMap:
    """Validate n+1 homogeneous forms of equal degree D >= 2 as a morphism of P^n."""
    if not forms:
        raise DomainError("no forms given")
    dicts = [{parse_exponent(e): to_fraction(c) for e, c in f.items() if c != 0} for f in forms]
    nvars = len(dicts)
    n = nvars - 1
    if n < 1:
        raise DomainError("need at least two forms")
    degs = set()
    for f in dicts:
        if not f:
            raise NotAMorphism("a form is identically zero")
        for e in f:
            if len(e) != nvars:
                raise DomainError("form has the wrong number of variables")
            degs.add(sum(e))
    if len(degs) != 1:
        raise DomainError("forms are not homogeneous of one common degree")
    D = degs.pop()
    if D < 2:
        raise DomainError("degree must be at least 2")
    # clear denominators jointly, divide by the content
    allc = [c for f in dicts for c in f.values()]
    den = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for c in allc), 1)
    ints = [{e: int(c * den) for e, c in f.items()} for f in dicts]
    g = reduce(gcd, (abs(c) for f in ints for c in f.values()), 0)
    ints = [{e: c // g for e, c in f.items()} for f in ints]
    forms_t = tuple(tuple(sorted(f.items(), reverse=True)) for f in ints)
    if n >= 3 and not unchecked:
        raise DomainError("morphism check is only certified for n <= 2; pass unchecked=True")
    cert = None
    if not unchecked:
        cert = _macaulay_certificate(n, D, forms_t)
        if cert is None:
            raise NotAMorphism("the forms have a common zero")
    return ProjectiveSelfMap(n, D, forms_t, unchecked, cert)


def _macaulay_certificate(n: int, D: int, forms):
    """(L, G, T) with L x_j^N = sum_i G_ij F_i for all j, or None if not a morphism."""
    nvars = n + 1
    N = nvars * (D - 1) + 1
    rows = _monomials(nvars, N)
    row_index = {m: r for r, m in enumerate(rows)}
    mults = _monomials(nvars, N - D)
    cols = []
    for i, f in enumerate(forms):
        for mu in mults:
            col = [0] * len(rows)
            for e, c in f:
                col[row_index[tuple(a + b for a, b in zip(e, mu))]] += c
            cols.append(col)
    A = fmpz_mat([[cols[c][r] for c in range(len(cols))] for r in range(len(rows))])
    if A.rank() < len(rows):
        return None
    # greedy choice of independent columns
    chosen = []
    for c in range(len(cols)):
        trial = chosen + [c]
        sub = fmpz_mat([[cols[k][r] for k in trial] for r in range(len(rows))])
        if sub.rank() == len(trial):
            chosen = trial
        if len(chosen) == len(rows):
            break
    sq = fmpq_mat(fmpz_mat([[cols[k][r] for k in chosen] for r in range(len(rows))]))
    rhs = fmpq_mat(len(rows), nvars, [1 if rows[r] == tuple(N if t == j else 0 for t in range(nvars)) else 0
                                     for r in range(len(rows)) for j in range(nvars)])
    sol = sq.solve(rhs)
    entries = [sol[r, j] for r in range(len(rows)) for j in range(nvars)]
    L = reduce(lambda a, b: a * b // gcd(a, b), (int(q.q) for q in entries), 1)
    G = max(abs(int(q.p) * (L // int(q.q))) for q in entries)
    T = len(mults)
    return (L, G, T)


def map_height(f: ProjectiveSelfMap, prec: int | None = None) -> CertifiedValue:
    """Height of all coefficients of f as one projective tuple."""
    return projective_height(ProjectiveTuple(f.coefficient_tuple()), prec)


@dataclass(frozen=True)
class GapBound:
    R: CertifiedValue
    R_plus: CertifiedValue
    R_minus: CertifiedValue | None
    method: str
    certified: bool

    def to_json(self) -> dict:
        return {
            "R": self.R.to_json(),
            "R_plus": self.R_plus.to_json(),
            "R_minus": None if self.R_minus is None else self.R_minus.to_json(),
            "method": self.method,
            "certified": self.certified,
        }


def _gap_balls(f: ProjectiveSelfMap, prec: int):
    with working_precision(prec):
        if f.is_power_map():
            return arb(0), arb(0), arb(0), "power_map_exact", True
        hf = projective_ball(ProjectiveTuple(f.coefficient_tuple()), prec)
        rp = hf + arb(comb(f.n + f.D, f.n)).log()
        if f.certificate is None:
            return rp, rp, None, "upper_only_unchecked", False
        L, G, T = f.certificate
        rm = arb((f.n + 1) * T * G).log()
        return rp.max(rm), rp, rm, "macaulay_certificate", True


def height_gap_bound(f: ProjectiveSelfMap, prec: int | None = None) -> GapBound:
    """R with |h(f(P)) - D h(P)| <= R for every point P."""
    prec = prec or default_precision()
    R, rp, rm, method, ok = _gap_balls(f, prec)
    with working_precision(prec):
        # report an upper bound as an exact value
        Rc = CertifiedValue.from_arb(R)
        return GapBound(Rc, CertifiedValue.from_arb(rp), None if rm is None else CertifiedValue.from_arb(rm),
                        method, ok)


def call_silverman_gap(R, alpha) -> CertifiedValue:
    """R / (alpha - 1)."""
    a = to_fraction(alpha)
    if a <= 1:
        raise DomainError("alpha must exceed 1")
    with working_precision(default_precision()):
        r = R.ball() if isinstance(R, CertifiedValue) else to_arb(to_fraction(R))
        return CertifiedValue.from_arb(r / to_arb(a - 1))


# ---------------------------------------------------------------------------
# canonical heights


@dataclass(frozen=True)
class CanonicalHeightResult:
    value: CertifiedValue
    iterations_used: int
    gap_bound_R: CertifiedValue
    tail_bound: CertifiedValue
    method: str

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "iterations_used": self.iterations_used,
            "gap_bound_R": self.gap_bound_R.to_json(),
            "tail_bound": self.tail_bound.to_json(),
            "method": self.method,
        }


def _int_point(P) -> tuple[int, ...]:
    if not isinstance(P, ProjectiveTuple):
        P = ProjectiveTuple(P)
    if not P.is_rational():
        raise DomainError("point is not rational")
    return primitive_int_vector([c.as_fraction() for c in P.coords])


def _normalize_int(v) -> tuple[int, ...]:
    g = reduce(gcd, (abs(x) for x in v), 0)
    if g == 0:
        raise RuntimeError("image of a point is the zero vector: not a morphism")
    v = [x // g for x in v]
    first = next(x for x in v if x)
    return tuple(x if first > 0 else -x for x in v)


def exact_orbit(f: ProjectiveSelfMap, x, steps: int, bits_cap: int = ORBIT_BITS_CAP):
    """Iterate on coprime integer tuples; returns (orbit list, (preperiod, period) or None)."""
    cur = _normalize_int(_int_point(x) if not isinstance(x, tuple) else x)
    seen = {cur: 0}
    orbit = [cur]
    for k in range(1, steps + 1):
        cur = _normalize_int(f(cur))
        if cur in seen:
            return orbit, (seen[cur], k - seen[cur])
        if max(abs(c) for c in cur).bit_length() > bits_cap:
            return orbit, None
        seen[cur] = k
        orbit.append(cur)
    return orbit, None


def _bad_primes(f: ProjectiveSelfMap) -> list[int]:
    if f.certificate is None:
        raise DomainError("local decomposition needs a certified morphism")
    L = f.certificate[0]
    if L == 1:
        return []
    return sorted(int(p) for p, _ in fmpz(L).factor())


def _vp(x: int, p: int) -> int:
    if x == 0:
        return 10**9
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _padic_terms(f: ProjectiveSelfMap, x0, p: int, K: int) -> list[int]:
    """v_p(F(x_k)) for p-adically primitive representatives x_k, k < K."""
    vL = _vp(f.certificate[0], p)
    M = (K + 2) * (vL + 1) + 4
    while True:
        mod = p**M
        cur = [c % mod for c in x0]
        prec_left = M
        out = []
        ok = True
        for _ in range(K):
            img = [_eval_form(form, cur) % (p**prec_left) for form in f.forms]
            v = min(_vp(c, p) if c else prec_left for c in img)
            if v >= prec_left or v > vL:
                ok = False
                break
            out.append(v)
            prec_left -= v
            cur = [(c // p**v) % (p**prec_left) for c in img]
        if ok:
            return out
        M *= 2
        if M > 1 << 16:
            raise ResourceError("p-adic precision cap reached")


def _arch_terms(f: ProjectiveSelfMap, x0, K: int, prec: int) -> list[arb]:
    """log|F(x_k)|_inf - D log|x_k|_inf along a ball orbit."""
    out = []
    with working_precision(prec):
        cur = [arb(c) for c in x0]
        for _ in range(K):
            img = [_eval_form(form, cur) for form in f.forms]
            nx = reduce(lambda a, b: a.max(b), [abs(c) for c in cur])
            ni = reduce(lambda a, b: a.max(b), [abs(c) for c in img])
            out.append(ni.log() - f.D * nx.log())
            # rescale by an exact number near the norm to keep sizes bounded
            s = max(img, key=lambda c: abs(c).mid()).mid()
            cur = [c / s for c in img] if s != 0 else img
    return out


def _log10(q: Fraction) -> float:
    return math.log10(q.numerator) - math.log10(q.denominator)


def canonical_height(f: ProjectiveSelfMap, P, tolerance=1e-8, prec: int | None = None,
                     orbit_budget: int = 32) -> CanonicalHeightResult:
    """Certified enclosure of lim h(f^k P) / D^k."""
    if not isinstance(P, ProjectiveTuple):
        P = ProjectiveTuple(P)
    if P.n != f.n:
        raise DomainError("point and map live in different dimensions")
    tol = Fraction(tolerance)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    prec = prec or default_precision()
    R_ball, _, _, _, _ = _gap_balls(f, prec)
    with working_precision(prec):
        Rc = CertifiedValue.from_arb(R_ball)
    if not P.is_rational():
        return _canonical_algebraic(f, P, tol, prec, R_ball)
    x0 = _int_point(P)
    _, period = exact_orbit(f, x0, orbit_budget)
    D = f.D
    if period is not None:
        zero = CertifiedValue.exact(0)
        return CanonicalHeightResult(zero, 0, Rc, zero, "orbit")
    with working_precision(prec):
        h0 = log_int(max(abs(c) for c in x0))
    if f.is_power_map():
        with working_precision(prec):
            zero = CertifiedValue.exact(0)
            return CanonicalHeightResult(CertifiedValue.from_arb(h0), 0, Rc, zero, "power_map_exact")
    # smallest K with R / ((D-1) D^K) <= tol / 2
    K = 0
    with working_precision(prec):
        while True:
            tail = R_ball / ((D - 1) * arb(D) ** K)
            if tail.upper() <= to_arb(tol / 2):
                break
            K += 1
            if K > MAX_ITERATIONS:
                raise ResourceError(f"tolerance 10^{_log10(tol):.1f} needs more than {MAX_ITERATIONS} iterations")
    primes = _bad_primes(f)
    fin = {p: _padic_terms(f, x0, p, K) for p in primes}
    wp = prec + 8 * K
    while wp <= 1 << 14:
        arch = _arch_terms(f, x0, K, wp)
        with working_precision(wp):
            acc = h0
            for k in range(K):
                lam = arch[k]
                for p in primes:
                    lam -= fin[p][k] * log_int(p)
                acc += lam / arb(D) ** (k + 1)
            tail = R_ball / ((D - 1) * arb(D) ** K)
            tail_up = tail.upper()
            total = arb(acc.mid(), acc.rad() + tail_up)
            if acc.rad() <= to_arb(tol / 2):
                return CanonicalHeightResult(
                    CertifiedValue.from_arb(total), K, Rc, CertifiedValue.from_arb(tail_up), "local_decomposition"
                )
        wp *= 2
    raise ResourceError("archimedean iteration lost too much precision")


def _canonical_algebraic(f, P, tol, prec, R_ball) -> CanonicalHeightResult:
    """Symbolic iteration up to ALGEBRAIC_DEPTH_CAP; exact 0 on a detected cycle."""
    D = f.D
    cur = P
    seen = {cur: 0}
    with working_precision(prec):
        Rc = CertifiedValue.from_arb(R_ball)
    best = None
    for k in range(0, ALGEBRAIC_DEPTH_CAP + 1):
        with working_precision(prec):
            hk = projective_ball(cur, prec)
            tail = R_ball / ((D - 1) * arb(D) ** k)
            est = hk / arb(D) ** k
            val = arb(est.mid(), est.rad() + tail.upper())
            best = (val, k, tail)
            if val.rad() <= to_arb(tol):
                return CanonicalHeightResult(CertifiedValue.from_arb(val), k, Rc,
                                             CertifiedValue.from_arb(tail.upper()), "symbolic")
        if k == ALGEBRAIC_DEPTH_CAP:
            break
        _, ys = cur.normalized()
        img = []
        for form in f.forms:
            acc = rational(0)
            for e, c in form:
                t = rational(c)
                for y, ei in zip(ys, e):
                    for _ in range(ei):
                        t = alg_mul(t, y)
                acc = alg_add(acc, t)
            img.append(acc)
        cur = ProjectiveTuple(img)
        if cur in seen:
            zero = CertifiedValue.exact(0)
            return CanonicalHeightResult(zero, k + 1, Rc, zero, "orbit")
        seen[cur] = k + 1
    val, k, tail = best
    with working_precision(prec):
        partial = CanonicalHeightResult(CertifiedValue.from_arb(val), k, Rc,
                                        CertifiedValue.from_arb(tail.upper()), "symbolic")
    raise ResourceError("tolerance not reached within the symbolic depth cap", partial=partial)


# ---------------------------------------------------------------------------
# preperiodicity, Lattes maps, constants


@dataclass(frozen=True)
class PreperiodicResult:
    status: str  # Preperiodic | NotPreperiodic | Inconclusive
    preperiod: int | None = None
    period: int | None = None
    height_lower_bound: CertifiedValue | None = None

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.status == "Preperiodic":
            out.update(preperiod=self.preperiod, period=self.period)
        if self.height_lower_bound is not None:
            out["height_lower_bound"] = self.height_lower_bound.to_json()
        return out


def preperiodic_test(f: ProjectiveSelfMap, P, budget: int = 64) -> PreperiodicResult:
    x0 = _int_point(P)
    _, per = exact_orbit(f, x0, budget)
    if per is not None:
        return PreperiodicResult("Preperiodic", per[0], per[1])
    try:
        res = canonical_height(f, ProjectiveTuple(x0), tolerance=1e-6, orbit_budget=0)
    except ResourceError:
        return PreperiodicResult("Inconclusive")
    if res.value.lower > 0:
        return PreperiodicResult("NotPreperiodic", height_lower_bound=CertifiedValue.exact(res.value.lower))
    return PreperiodicResult("Inconclusive")


def lattes_duplication(a, b) -> ProjectiveSelfMap:
    """x-coordinate duplication map of y^2 = x^3 + a x + b on P^1 (variables x, z)."""
    a, b = to_fraction(a), to_fraction(b)
    if 4 * a**3 + 27 * b**2 == 0:
        raise DomainError("singular curve: 4a^3 + 27b^2 = 0")
    F0 = {(4, 0): Fraction(1), (2, 2): -2 * a, (1, 3): -8 * b, (0, 4): a * a}
    F1 = {(3, 1): Fraction(4), (1, 3): 4 * a, (0, 4): 4 * b}
    return make_selfmap([F0, F1])


@dataclass(frozen=True)
class DynConstants:
    n: int
    D: int
    C1: int
    C2: int | None
    log_C2: CertifiedValue
    C2_exponent: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "D": self.D,
            "C1": str(self.C1),
            "C2": None if self.C2 is None else str(self.C2),
            "log_C2": self.log_C2.to_json(),
            "C2_formula": f"3^{self.n} * {self.n}^{self.n + 1} * {2 * self.D}^{self.C2_exponent}",
        }


def dyn_constants(n: int, D: int, prec: int | None = None) -> DynConstants:
    """C1 = 5 n D^{n+1}; C2 = 3^n n^{n+1} (2D)^{n 2^{n+4} D^n}."""
    if n < 1 or D < 2:
        raise DomainError("need n >= 1 and D >= 2")
    prec = prec or default_precision()
    C1 = 5 * n * D ** (n + 1)
    E = n * 2 ** (n + 4) * D**n
    bits = E * log2(2 * D) + n * log2(3) + (n + 1) * log2(n)
    C2 = 3**n * n ** (n + 1) * (2 * D) ** E if bits <= C2_EXACT_BITS else None
    with working_precision(prec + 64):
        logc2 = n * arb(3).log() + (n + 1) * arb(n).log() + E * arb(2 * D).log()
        return DynConstants(n, D, C1, C2, CertifiedValue.from_arb(logc2), E)
