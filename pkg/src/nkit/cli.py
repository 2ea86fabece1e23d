"""Command-line interface: ``nkit <subcommand> ...``.

Every command prints JSON (or CSV / markdown where offered) to stdout or to
``--out``.  Exit codes: 0 success, 2 domain error, 3 resource error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from flint import arb

from .certified import set_default_precision, to_arb
from .errors import DomainError, ResourceError

EXIT_OK, EXIT_DOMAIN, EXIT_RESOURCE = 0, 2, 3
GLOBAL_DEFAULTS = {"precision_bits": None, "seed": 0, "threads": 1, "out": None}


def _load_json(s: str):
    """Inline JSON, or @path / an existing file path."""
    if s.startswith("@"):
        return json.loads(Path(s[1:]).read_text())
    if not s.lstrip().startswith(("{", "[", '"')) and os.path.exists(s):
        return json.loads(Path(s).read_text())
    try:
        return json.loads(s)
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON input: {exc}") from None


def _real(s: str):
    """Rational literal, or log(q) as a ball."""
    t = s.strip().replace(" ", "")
    if t.startswith("log"):
        return to_arb(Fraction(t[3:].strip("()"))).log()
    try:
        return Fraction(t)
    except ValueError:
        raise DomainError(f"not a number: {s!r}") from None


def _exact(s: str) -> Fraction:
    v = _real(s)
    if isinstance(v, arb):
        raise DomainError("this input must be rational")
    return v


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# handlers


def cmd_height(args):
    from .algebraic import AlgebraicNumber
    from .heights import HeightKind, height

    obj = _load_json(args.input)
    if args.kind == "weighted":
        kind = HeightKind.weighted(_exact(args.gamma or "0"))
    else:
        kind = {"weil": HeightKind.WEIL, "house": HeightKind.HOUSE, "l2": HeightKind.L2}[args.kind]
    if isinstance(obj, list):
        from .heights import ProjectiveTuple

        x = ProjectiveTuple([AlgebraicNumber.from_json(c) for c in obj])
    else:
        x = AlgebraicNumber.from_json(obj)
    v = height(x, kind)
    return _dump(v.to_json())


def cmd_mahler(args):
    from .measures import dirichlet_L2_chi3, mahler_measure_2var
    from .heights import log_mahler_measure

    if args.l2chi3:
        return _dump(dirichlet_L2_chi3().to_json())
    obj = _load_json(args.poly)
    if isinstance(obj, dict):
        f = {tuple(int(x) for x in k.split(",")): int(v) for k, v in obj.items()}
        return _dump(mahler_measure_2var(f).to_json())
    return _dump(log_mahler_measure([int(c) for c in obj]).to_json())


def cmd_northcott_bound(args):
    from .northcott import nc_house_lower_bound, nc_lower_bound, nc_upper_bound

    C = _real(args.C)
    if args.direction == "upper":
        if args.metric != "weil":
            raise DomainError("upper bounds are for the Weil metric")
        rep = nc_upper_bound(C, args.d, args.mode)
    elif args.metric == "house":
        rep = nc_house_lower_bound(C, args.d, args.mode)
    else:
        rep = nc_lower_bound(C, args.d, args.mode)
    return _dump(rep.to_json())


def cmd_tower_build(args):
    from .northcott import build_tower

    return _dump(build_tower(args.t, args.count).to_json())


def _cycle(args):
    from .chow import ProjectiveCycle

    return ProjectiveCycle.from_json(_load_json(args.cycle))


def cmd_chow(args):
    from .chow import cycle_chow_form

    return _dump(cycle_chow_form(_cycle(args)).to_json())


def cmd_philippon(args):
    from .chow import philippon_height, philippon_tilde_height

    V = _cycle(args)
    if args.tilde:
        return _dump(philippon_tilde_height(V).to_json())
    return _dump(philippon_height(V, seed=args.seed).to_json())


def cmd_dyn_canonical(args):
    from .algebraic import AlgebraicNumber
    from .dynamics import ProjectiveSelfMap, canonical_height
    from .heights import ProjectiveTuple

    f = ProjectiveSelfMap.from_json(_load_json(args.map))
    P = ProjectiveTuple([AlgebraicNumber.from_json(c) for c in _load_json(args.point)])
    return _dump(canonical_height(f, P, tolerance=_exact(args.tol)).to_json())


def cmd_dyn_gap(args):
    from .dynamics import ProjectiveSelfMap, height_gap_bound

    f = ProjectiveSelfMap.from_json(_load_json(args.map))
    return _dump(height_gap_bound(f).to_json())


def cmd_dyn_constants(args):
    from .dynamics import dyn_constants

    return _dump(dyn_constants(args.n, args.D).to_json())


def cmd_cm_classpoly(args):
    from .cm import class_polynomial, reduced_forms

    H = class_polynomial(args.disc, args.start_bits)
    return _dump({"disc": args.disc, "class_number": len(reduced_forms(args.disc)), "coefficients": H.to_json()})


def cmd_cm_profile(args):
    from .cm import CMProfileRow, cm_profile, fundamental_discriminants, weighted_exponent_probe

    ds = fundamental_discriminants(args.min_disc, args.max_disc)
    rows = cm_profile(ds, route=args.route, workers=args.threads)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CMProfileRow.CSV_FIELDS)
        for r in rows:
            w.writerow(r.csv_row())
        return buf.getvalue()
    out = {"rows": [r.to_json() for r in rows]}
    if args.gamma is not None:
        out["probe"] = weighted_exponent_probe(rows, float(_exact(args.gamma)))
    return _dump(out)


def cmd_threshold(args):
    from . import thresholds as T

    if args.which == "proj":
        rep = T.threshold_proj(args.n, args.d, _exact(args.C),
                               None if args.relative_c is None else _exact(args.relative_c))
    elif args.which == "abvar":
        rep = T.threshold_abvar(args.g, args.d, _exact(args.C), _exact(args.h2), args.n)
    elif args.which == "dyn":
        rep = T.threshold_dyn(args.n, args.D, args.d, _exact(args.C), _exact(args.h_f))
    else:
        rep = T.threshold_main(args.d, _exact(args.C), _exact(args.R))
    return _dump(rep.to_json())


def cmd_experiment(args):
    from .dynamics import ProjectiveSelfMap
    from .experiment import ExperimentConfig, emit_report, run_finiteness_experiment
    from .northcott import build_tower

    if args.config:
        obj = _load_json(args.config)
        obj.setdefault("seed", args.seed)
        cfg = ExperimentConfig.from_json(obj)
    else:
        tower = build_tower(args.t, args.k) if args.t is not None and args.k > 0 else None
        fmap = ProjectiveSelfMap.from_json(_load_json(args.map)) if args.map else None
        cfg = ExperimentConfig(args.target, args.n, args.d, args.cutoff, args.height, tower, args.k if tower else 0,
                               fmap, None, args.buckets, args.seed)
    return emit_report(run_finiteness_experiment(cfg), args.format)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand from resetting a flag given before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=argparse.SUPPRESS,
                        help="working precision in bits (default from NKIT_PRECISION_BITS or 128)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized quadrature")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes for batch commands")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write output here instead of stdout")

    p = argparse.ArgumentParser(prog="nkit", description="Heights, Northcott bounds and finiteness censuses.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("height", parents=[common], help="height of an algebraic number or projective tuple")
    s.add_argument("--kind", choices=["weil", "house", "l2", "weighted"], default="weil")
    s.add_argument("--gamma", default=None, help="exponent for --kind weighted")
    s.add_argument("--input", required=True,
                   help='JSON: "3/2", {"minpoly": [-2, 0, 1], "index": 1}, or a list of coordinates')
    s.set_defaults(func=cmd_height)

    s = sub.add_parser("mahler", parents=[common], help="log Mahler measure")
    s.add_argument("--poly", default="[1, 1]",
                   help='coefficient list (one variable) or {"i,j": c} (two variables)')
    s.add_argument("--l2chi3", action="store_true", help="(3 sqrt3 / 4 pi) L(2, chi_-3) = m(1 + x + y) instead")
    s.set_defaults(func=cmd_mahler)

    nc = sub.add_parser("northcott", parents=[common]).add_subparsers(dest="sub", required=True)
    s = nc.add_parser("bound", parents=[common], help="Northcott number bounds from a height bound C")
    s.add_argument("--direction", choices=["lower", "upper"], default="lower")
    s.add_argument("--metric", choices=["weil", "house"], default="weil")
    s.add_argument("--C", required=True, help="rational or log(q)")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--mode", default="simple",
                   choices=["simple", "optimal", "per_j_conservative", "per_j_min"])
    s.set_defaults(func=cmd_northcott_bound)

    tw = sub.add_parser("tower", parents=[common]).add_subparsers(dest="sub", required=True)
    s = tw.add_parser("build", parents=[common], help="prime-root tower with roots converging to exp(2t)")
    s.add_argument("--t", required=True)
    s.add_argument("--count", type=int, required=True)
    s.set_defaults(func=cmd_tower_build)

    s = sub.add_parser("chow", parents=[common], help="Chow form of a cycle")
    s.add_argument("--cycle", required=True)
    s.set_defaults(func=cmd_chow)

    s = sub.add_parser("philippon", parents=[common], help="Philippon height of a cycle")
    s.add_argument("--cycle", required=True)
    s.add_argument("--tilde", action="store_true", help="max-coefficient variant")
    s.set_defaults(func=cmd_philippon)

    dy = sub.add_parser("dyn", parents=[common]).add_subparsers(dest="sub", required=True)
    s = dy.add_parser("canonical", parents=[common], help="canonical height of a point")
    s.add_argument("--map", required=True, help='[{"2,0": "1"}, {"0,2": "1"}]')
    s.add_argument("--point", required=True, help='["2", "1"]')
    s.add_argument("--tol", default="1e-8")
    s.set_defaults(func=cmd_dyn_canonical)
    s = dy.add_parser("gap", parents=[common], help="height-gap bound R of a map")
    s.add_argument("--map", required=True)
    s.set_defaults(func=cmd_dyn_gap)
    s = dy.add_parser("constants", parents=[common], help="C1(n, D) and C2(n, D)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--D", type=int, required=True)
    s.set_defaults(func=cmd_dyn_constants)

    cm = sub.add_parser("cm", parents=[common]).add_subparsers(dest="sub", required=True)
    s = cm.add_parser("classpoly", parents=[common], help="Hilbert class polynomial")
    s.add_argument("--disc", type=int, required=True)
    s.add_argument("--start-bits", type=int, default=None)
    s.set_defaults(func=cmd_cm_classpoly)
    s = cm.add_parser("profile", parents=[common], help="height profile of CM j-invariants")
    s.add_argument("--min-disc", type=int, default=3)
    s.add_argument("--max-disc", type=int, required=True)
    s.add_argument("--route", choices=["direct", "minpoly"], default="direct")
    s.add_argument("--gamma", default=None, help="also run the weighted-exponent probe")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.set_defaults(func=cmd_cm_profile)

    s = sub.add_parser("threshold", parents=[common], help="explicit Northcott thresholds")
    s.add_argument("which", choices=["proj", "abvar", "dyn", "main"])
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--C", default="1")
    s.add_argument("--g", type=int, default=1)
    s.add_argument("--h2", default="0", help="h2 of the theta null point (abvar)")
    s.add_argument("--D", type=int, default=2)
    s.add_argument("--h-f", dest="h_f", default="0")
    s.add_argument("--R", default="0")
    s.add_argument("--relative-c", dest="relative_c", default=None)
    s.add_argument("--json", action="store_true", help="JSON output (the default)")
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("experiment", parents=[common], help="finiteness census below a cutoff")
    s.add_argument("--config", default=None, help="ExperimentConfig JSON (overrides the flags below)")
    s.add_argument("--target", choices=["points", "zero_cycles", "divisors_p2", "dynamics"], default="points")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--cutoff", default="log(2)")
    s.add_argument("--height", default=None)
    s.add_argument("--t", default=None, help="tower parameter (with --k > 0)")
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--map", default=None)
    s.add_argument("--buckets", type=int, default=4)
    s.add_argument("--format", choices=["json", "csv", "markdown"], default="json")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.precision_bits is not None:
        if args.precision_bits < 16:
            parser.error("--precision-bits must be at least 16")
        set_default_precision(args.precision_bits)
    try:
        text = args.func(args)
        _emit(args, text)
    except ResourceError as exc:
        print(f"nkit: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except KeyError as exc:
        print(f"nkit: missing field {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DomainError, ValueError, IndexError, TypeError, json.JSONDecodeError) as exc:
        print(f"nkit: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
