"""Finiteness census: enumerate small-height objects below a cutoff.

The census never proves finiteness; it reports what lies under the cutoff
and says whether the enumeration was exhaustive ("complete") or only a
sound sample.  Exhaustive routes:

- points of P^n over Q: every primitive integer vector inside the box
  max |x_i| <= exp(B) where B bounds the naive height;
- points of P^1 of degree <= d over Q: enumerate_bounded, which is complete;
- dynamics: the box is widened by R/(D-1), so every point with canonical
  height <= cutoff is among the candidates.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from flint import arb

from .algebraic import rational
from .certified import CertifiedValue, default_precision, log_int, to_arb, working_precision
from .chow import CurveComponent, PointComponent, ProjectiveCycle, philippon_height, philippon_tilde_ball
from .dynamics import ProjectiveSelfMap, canonical_height, height_gap_bound
from .errors import DomainError
from .heights import ProjectiveTuple, projective_ball
from .northcott import TIE_TOLERANCE, TowerSpec, enumerate_bounded, tower_field_elements
from .thresholds import ThresholdReport

TARGETS = ("points", "zero_cycles", "divisors_p2", "dynamics")
HEIGHTS = {"points": ("toric", "philippon"), "zero_cycles": ("toric", "philippon"),
           "divisors_p2": ("tilde",), "dynamics": ("dynamical",)}
MAX_CANDIDATES = 2_000_000
MAX_CURVE_DEGREE = 3
MAX_N = 3


def parse_cutoff(s) -> tuple[str, Fraction]:
    """'log(q)' / 'log q' / 'logq' means log q exactly; anything else is a rational."""
    t = str(s).strip().replace(" ", "")
    if t.startswith("log"):
        q = Fraction(t[3:].strip("()"))
        if q < 1:
            raise DomainError("cutoff log(q) needs q >= 1")
        return ("log", q)
    v = Fraction(t)
    if v < 0:
        raise DomainError("cutoff must be non-negative")
    return ("num", v)


def cutoff_ball(c) -> arb:
    kind, q = c
    return to_arb(q).log() if kind == "log" else to_arb(q)


def cutoff_str(c) -> str:
    kind, q = c
    return f"log({q})" if kind == "log" else str(q)


@dataclass(frozen=True)
class ExperimentConfig:
    target: str = "points"
    n: int = 1
    d: int = 1
    cutoff: str = "log(2)"
    height: str | None = None
    tower: TowerSpec | None = None
    k: int = 0
    dyn_map: ProjectiveSelfMap | None = None
    threshold: ThresholdReport | None = None
    buckets: int = 4
    seed: int = 0

    def validate(self) -> "ExperimentConfig":
        if self.target not in TARGETS:
            raise DomainError(f"target must be one of {TARGETS}")
        h = self.height or HEIGHTS[self.target][0]
        if h not in HEIGHTS[self.target]:
            raise DomainError(f"height {h!r} not available for target {self.target}")
        if not 1 <= self.n <= MAX_N:
            raise DomainError(f"n must lie in 1..{MAX_N}")
        if self.d < 1:
            raise DomainError("degree cap must be >= 1")
        if self.buckets < 1:
            raise DomainError("need at least one bucket")
        parse_cutoff(self.cutoff)
        if self.tower is not None and not 0 <= self.k <= len(self.tower.steps):
            raise DomainError("truncation k outside the tower")
        if self.target == "divisors_p2":
            if self.n != 2:
                raise DomainError("divisors_p2 lives in P^2")
            if self.d > MAX_CURVE_DEGREE:
                raise DomainError(f"curve degree cap {MAX_CURVE_DEGREE} exceeded")
        if self.target == "dynamics":
            if self.dyn_map is None:
                raise DomainError("dynamics target needs a map")
            if self.dyn_map.n != self.n:
                raise DomainError("map dimension differs from n")
        if self.target in ("divisors_p2", "dynamics") and self.tower is not None and self.k > 0:
            raise DomainError(f"{self.target} runs over Q only")
        return ExperimentConfig(self.target, self.n, self.d, cutoff_str(parse_cutoff(self.cutoff)), h,
                                self.tower, self.k, self.dyn_map, self.threshold, self.buckets, self.seed)

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "n": self.n,
            "d": self.d,
            "cutoff": self.cutoff,
            "height": self.height,
            "tower": None if self.tower is None else self.tower.to_json(),
            "k": self.k,
            "map": None if self.dyn_map is None else self.dyn_map.to_json(),
            "threshold": None if self.threshold is None else self.threshold.to_json(),
            "buckets": self.buckets,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj) -> "ExperimentConfig":
        return cls(
            obj.get("target", "points"),
            int(obj.get("n", 1)),
            int(obj.get("d", 1)),
            str(obj.get("cutoff", "log(2)")),
            obj.get("height"),
            None if obj.get("tower") is None else TowerSpec.from_json(obj["tower"]),
            int(obj.get("k", 0)),
            None if obj.get("map") is None else ProjectiveSelfMap.from_json(obj["map"]),
            None if obj.get("threshold") is None else ThresholdReport.from_json(obj["threshold"]),
            int(obj.get("buckets", 4)),
            int(obj.get("seed", 0)),
        )


@dataclass(frozen=True)
class ExperimentReport:
    config: dict
    total: int
    buckets: tuple  # ((lo, hi, count), ...) as decimal strings
    witnesses: tuple  # ({"object": ..., "height": {...}}, ...)
    soundness: str  # complete | sound-sample
    candidates: int = 0
    undecided: int = 0
    below_threshold: bool | None = None
    notes: tuple = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "total": self.total,
            "buckets": [{"lo": lo, "hi": hi, "count": c} for lo, hi, c in self.buckets],
            "witnesses": list(self.witnesses),
            "soundness": self.soundness,
            "candidates": self.candidates,
            "undecided": self.undecided,
            "below_threshold": self.below_threshold,
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, obj) -> "ExperimentReport":
        return cls(
            obj["config"],
            int(obj["total"]),
            tuple((b["lo"], b["hi"], int(b["count"])) for b in obj["buckets"]),
            tuple(obj["witnesses"]),
            obj["soundness"],
            int(obj.get("candidates", 0)),
            int(obj.get("undecided", 0)),
            obj.get("below_threshold"),
            tuple(obj.get("notes", ())),
        )

    def __eq__(self, other):
        return isinstance(other, ExperimentReport) and self.to_json() == other.to_json()

    __hash__ = None


# ---------------------------------------------------------------------------
# candidate streams


def primitive_vectors(n: int, M: int):
    """Primitive integer (n+1)-vectors with max |x_i| <= M and first nonzero entry positive."""
    count = (2 * M + 1) ** (n + 1)
    if count > MAX_CANDIDATES:
        raise DomainError(f"{count} candidate vectors exceed the cap {MAX_CANDIDATES}")
    for v in itertools.product(range(-M, M + 1), repeat=n + 1):
        first = next((x for x in v if x), 0)
        if first <= 0:
            continue
        g = 0
        for x in v:
            g = gcd(g, x)
        if g == 1:
            yield v


def _box_radius(B: arb) -> int:
    """An integer M with exp(B) < M + 1 (rounded out)."""
    e = B.exp().upper()
    f = e.floor().unique_fmpz()
    if f is None:
        f = (e + 1).floor().unique_fmpz()
    return int(f)


def _int_height_le(M: int, c, prec: int) -> bool | None:
    """log M <= cutoff, decided exactly where possible; None when undecidable."""
    kind, q = c
    if kind == "log":
        return Fraction(M) <= q
    with working_precision(prec):
        diff = log_int(M) - to_arb(q)
        if diff <= 0:
            return True
        if diff > 0:
            return False
        return None


def _ball_le(h: arb, cb: arb) -> bool | None:
    """Three-way comparison with the tie tolerance."""
    if h.upper() <= cb.lower() + TIE_TOLERANCE:
        return True
    if h.lower() > cb.upper() + TIE_TOLERANCE:
        return False
    if h.mid() <= cb.mid() and (h.rad() + cb.rad()) < TIE_TOLERANCE:
        return True
    return None


class _Census:
    def __init__(self, cfg: ExperimentConfig, prec: int):
        self.cfg = cfg
        self.prec = prec
        self.c = parse_cutoff(cfg.cutoff)
        with working_precision(prec):
            self.cb = cutoff_ball(self.c)
        self.witnesses = []
        self.candidates = 0
        self.undecided = 0
        self.notes = []

    def offer(self, obj, h: arb, verdict=None, rigorous: bool = True):
        self.candidates += 1
        with working_precision(self.prec):
            ok = _ball_le(h, self.cb) if verdict is None else verdict
            if ok is None:
                self.undecided += 1
                return
            if ok:
                self.witnesses.append((obj, CertifiedValue.from_arb(h, rigorous)))


def _run_points(cen: _Census):
    cfg, prec = cen.cfg, cen.prec
    over_q = cfg.tower is None or cfg.k == 0
    if cfg.height == "philippon":
        return _run_points_philippon(cen)
    if over_q and cfg.d == 1:
        with working_precision(prec):
            M = _box_radius(cen.cb + TIE_TOLERANCE)
        for v in primitive_vectors(cfg.n, M):
            m = max(abs(x) for x in v)
            with working_precision(prec):
                cen.offer({"point": [str(x) for x in v]}, log_int(m), _int_height_le(m, cen.c, prec))
        return "complete"
    if over_q and cfg.n == 1:
        with working_precision(prec):
            B = cen.cb.upper()
        elems = list(enumerate_bounded(cfg.d, float(B), prec))
        pts = [ProjectiveTuple([rational(0), rational(1)])] + [ProjectiveTuple([rational(1), x]) for x in elems]
        _offer_projective(cen, pts)
        return "complete"
    # tower sample: P^n points with coordinates among a few sampled field elements
    with working_precision(prec):
        B = cen.cb.upper()
    elems = list(tower_field_elements(cfg.tower, cfg.k, cfg.d, float(B), prec))
    elems = [e for e in elems][:12]
    pts = []
    for tail in itertools.product([rational(0)] + elems, repeat=cfg.n):
        pts.append(ProjectiveTuple([rational(1), *tail]))
    for i in range(1, cfg.n + 1):
        pts.append(ProjectiveTuple([rational(0)] * i + [rational(1)] + [rational(0)] * (cfg.n - i)))
    _offer_projective(cen, pts)
    cen.notes.append("tower elements are a sound sample, not an exhaustive list")
    return "sound-sample"


def _offer_projective(cen: _Census, pts):
    seen = set()
    for P in pts:
        if P.key() in seen:
            continue
        seen.add(P.key())
        with working_precision(cen.prec):
            h = projective_ball(P, cen.prec)
        cen.offer({"point": P.to_json()}, h)


def _run_points_philippon(cen: _Census):
    """h_Ph of rational points; the box comes from |h - h_Ph| <= (7/2) n log 2."""
    cfg, prec = cen.cfg, cen.prec
    if not (cfg.tower is None or cfg.k == 0) or cfg.d != 1:
        raise DomainError("Philippon census is implemented for rational points only")
    with working_precision(prec):
        B = cen.cb + arb(7) / 2 * cfg.n * arb(2).log() + TIE_TOLERANCE
        M = _box_radius(B)
    for v in primitive_vectors(cfg.n, M):
        V = ProjectiveCycle.of(cfg.n, [(1, PointComponent(ProjectiveTuple(list(v))))])
        rep = philippon_height(V, prec)
        with working_precision(prec):
            cen.offer({"cycle": V.to_json()}, rep.h_ph.ball())
    cen.notes.append("box radius from the toric/Philippon comparison for points")
    return "complete"


def _run_zero_cycles(cen: _Census):
    """Effective zero-cycles sum m_i [orbit_i] of total degree <= d, toric height sum m_i |orbit_i| h."""
    cfg, prec = cen.cfg, cen.prec
    if cfg.height == "philippon":
        raise DomainError("zero-cycle census uses the toric height")
    over_q = cfg.tower is None or cfg.k == 0
    comps = []  # (degree, height ball, json)
    with working_precision(prec):
        B = cen.cb.upper() + TIE_TOLERANCE
    if over_q and cfg.n == 1:
        elems = list(enumerate_bounded(cfg.d, float(B), prec))
        pts = [ProjectiveTuple([rational(0), rational(1)])] + [ProjectiveTuple([rational(1), x]) for x in elems]
        soundness = "complete"
    elif over_q:
        with working_precision(prec):
            M = _box_radius(arb(B))
        pts = [ProjectiveTuple(list(v)) for v in primitive_vectors(cfg.n, M)]
        soundness = "complete" if cfg.d == 1 else "sound-sample"
        if cfg.d > 1:
            cen.notes.append("only rational points are used as components in P^n, n >= 2")
    else:
        elems = list(tower_field_elements(cfg.tower, cfg.k, cfg.d, float(B), prec))[:12]
        pts = [ProjectiveTuple([rational(0), rational(1)])] + [
            ProjectiveTuple([rational(1)] + [e] * cfg.n) for e in elems]
        soundness = "sound-sample"
    seen = set()
    for P in pts:
        comp = PointComponent(P)
        key = comp.key()
        if key in seen:
            continue
        seen.add(key)
        deg = comp.degree
        if deg > cfg.d:
            continue
        with working_precision(prec):
            h = deg * projective_ball(P, prec)
        if _ball_le(h, arb(B)) is False:
            continue
        comps.append((deg, h, comp))
    comps.sort(key=lambda t: json.dumps(t[2].to_json(), sort_keys=True))

    def rec(start, budget, chosen):
        for i in range(start, len(comps)):
            deg = comps[i][0]
            if deg > budget:
                continue
            for m in range(1, budget // deg + 1):
                nxt = chosen + [(m, i)]
                yield nxt
                yield from rec(i + 1, budget - m * deg, nxt)

    for sel in rec(0, cfg.d, []):
        with working_precision(prec):
            h = sum((m * comps[i][1] for m, i in sel), arb(0))
        if _ball_le(h, cen.cb) is False:
            cen.candidates += 1
            continue
        V = ProjectiveCycle.of(cfg.n, [(m, comps[i][2]) for m, i in sel])
        cen.offer({"cycle": V.to_json()}, h)
    return soundness


def _ternary_monomials(deg: int):
    return [(a, b, deg - a - b) for a in range(deg, -1, -1) for b in range(deg - a, -1, -1)]


def _run_divisors(cen: _Census):
    """Irreducible plane curves of degree <= d with primitive coefficients in the box exp(cutoff)."""
    cfg, prec = cen.cfg, cen.prec
    with working_precision(prec):
        M = _box_radius(cen.cb + TIE_TOLERANCE)
    for deg in range(1, cfg.d + 1):
        mons = _ternary_monomials(deg)
        count = (2 * M + 1) ** len(mons)
        if count > MAX_CANDIDATES:
            raise DomainError(f"{count} candidate curves of degree {deg} exceed the cap {MAX_CANDIDATES}")
        for v in primitive_vectors(len(mons) - 1, M):
            poly = {e: c for e, c in zip(mons, v) if c}
            try:
                comp = CurveComponent.of(poly)
            except DomainError:
                continue
            if dict(comp.terms) != {e: c for e, c in poly.items()}:
                continue  # another sign representative of the same curve
            V = ProjectiveCycle.of(2, [(1, comp)])
            with working_precision(prec):
                h = philippon_tilde_ball(V, prec)
            cen.offer({"cycle": V.to_json()}, h)
    cen.notes.append("coefficient box exp(cutoff); the Chow-form height is not bounded by it in general")
    return "sound-sample"


def _run_dynamics(cen: _Census):
    cfg, prec = cen.cfg, cen.prec
    f = cfg.dyn_map
    gb = height_gap_bound(f, prec)
    with working_precision(prec):
        shift = gb.R.ball() / (f.D - 1)
        M = _box_radius(cen.cb + shift + TIE_TOLERANCE)
    for v in primitive_vectors(cfg.n, M):
        res = canonical_height(f, ProjectiveTuple(list(v)), tolerance=1e-10, prec=prec)
        with working_precision(prec):
            cen.offer({"point": [str(x) for x in v], "method": res.method}, res.value.ball())
    if not gb.certified:
        cen.notes.append("gap bound is not certified for this map")
        return "sound-sample"
    return "complete"


RUNNERS = {"points": _run_points, "zero_cycles": _run_zero_cycles, "divisors_p2": _run_divisors,
           "dynamics": _run_dynamics}


def _buckets(cb: arb, heights, nb: int):
    top = float(cb.mid())
    if top <= 0:
        nb = 1
    edges = [Fraction(top) * i / nb for i in range(nb + 1)]
    counts = [0] * nb
    for h in heights:
        x = Fraction(str(h.mid))
        idx = nb - 1
        for i in range(nb):
            if x < edges[i + 1]:
                idx = i
                break
        counts[idx] += 1
    fmt = lambda q: f"{float(q):.6g}"
    return tuple((fmt(edges[i]), fmt(edges[i + 1]), counts[i]) for i in range(nb))


def run_finiteness_experiment(cfg: ExperimentConfig, prec: int | None = None) -> ExperimentReport:
    cfg = cfg.validate()
    prec = prec or default_precision()
    cen = _Census(cfg, prec)
    soundness = RUNNERS[cfg.target](cen)
    wit = sorted(cen.witnesses, key=lambda t: json.dumps(t[0], sort_keys=True))
    witnesses = tuple(dict(obj, height=h.to_json()) for obj, h in wit)
    below = None
    if cfg.threshold is not None:
        with working_precision(prec):
            below = bool(cen.cb.upper() < cfg.threshold.threshold.ball().lower())
    if cen.undecided:
        cen.notes.append(f"{cen.undecided} candidates could not be placed relative to the cutoff")
    return ExperimentReport(
        cfg.to_json(),
        len(witnesses),
        _buckets(cen.cb, [h for _, h in wit], cfg.buckets),
        witnesses,
        soundness,
        cen.candidates,
        cen.undecided,
        below,
        tuple(cen.notes),
    )


# ---------------------------------------------------------------------------
# rendering


def emit_report(report: ExperimentReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "lo", "hi", "count", "object", "height"])
        for lo, hi, c in report.buckets:
            w.writerow(["bucket", lo, hi, c, "", ""])
        for wt in report.witnesses:
            obj = {k: v for k, v in wt.items() if k != "height"}
            h = CertifiedValue.from_json(wt["height"])
            w.writerow(["witness", "", "", "", json.dumps(obj, sort_keys=True), h.render()])
        return buf.getvalue()
    if fmt == "markdown":
        lines = [
            "# Finiteness census",
            "",
            f"- target: {report.config.get('target', '')}",
            f"- cutoff: {report.config.get('cutoff', '')}",
            f"- soundness: {report.soundness}",
            f"- witnesses: {report.total}",
            f"- candidates examined: {report.candidates}",
        ]
        if report.below_threshold is not None:
            lines.append(f"- cutoff below threshold: {report.below_threshold}")
        lines += ["", "| lo | hi | count |", "|---|---|---|"]
        lines += [f"| {lo} | {hi} | {c} |" for lo, hi, c in report.buckets]
        if report.witnesses:
            lines += ["", "| object | height |", "|---|---|"]
            for wt in report.witnesses:
                obj = {k: v for k, v in wt.items() if k != "height"}
                h = CertifiedValue.from_json(wt["height"])
                lines.append(f"| `{json.dumps(obj, sort_keys=True)}` | {h.render()} |")
        for note in report.notes:
            lines.append(f"\n> {note}")
        return "\n".join(lines) + "\n"
    raise DomainError(f"unknown format {fmt!r}")


def empty_report() -> ExperimentReport:
    return ExperimentReport({}, 0, (), (), "complete")
