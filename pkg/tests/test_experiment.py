import csv
import decimal
import io
import json
import math
from fractions import Fraction

import pytest

from nkit.certified import CertifiedValue
from nkit.chow import PointComponent, ProjectiveCycle, philippon_height
from nkit.dynamics import make_selfmap
from nkit.errors import DomainError
from nkit.experiment import (
    ExperimentConfig,
    ExperimentReport,
    cutoff_str,
    emit_report,
    empty_report,
    parse_cutoff,
    primitive_vectors,
    run_finiteness_experiment,
)
from nkit.heights import ProjectiveTuple
from nkit.thresholds import threshold_proj

CHEB = make_selfmap([{(2, 0): 1, (0, 2): -1}, {(0, 2): 1}])


def _brute_points(n, M):
    out = set()
    for v in __import__("itertools").product(range(-M, M + 1), repeat=n + 1):
        if any(v) and math.gcd(*v) == 1:
            first = next(x for x in v if x)
            out.add(tuple(x if first > 0 else -x for x in v))
    return out


def _pts(rep):
    return {tuple(int(x) for x in w["point"]) for w in rep.witnesses}


@pytest.fixture(scope="module")
def default_report():
    return run_finiteness_experiment(ExperimentConfig())


def test_default_matches_brute_force(default_report):
    assert _pts(default_report) == _brute_points(1, 2)
    assert default_report.total == 8
    assert default_report.soundness == "complete"
    assert sum(c for _, _, c in default_report.buckets) == default_report.total


@pytest.mark.parametrize("n,cutoff,M", [(1, "0", 1), (2, "0", 1), (2, "log(2)", 2), (3, "0", 1)])
def test_rational_points_match_brute_force(n, cutoff, M):
    rep = run_finiteness_experiment(ExperimentConfig(n=n, cutoff=cutoff))
    assert _pts(rep) == _brute_points(n, M)
    assert len(_brute_points(1, 1)) == 4 and len(_brute_points(2, 1)) == 13


def test_degree_two_height_zero_is_roots_of_unity():
    rep = run_finiteness_experiment(ExperimentConfig(n=1, d=2, cutoff="0"))
    # 0, infinity and the eight roots of unity of degree <= 2
    assert rep.total == 10
    minpolys = {tuple(w["point"][1]["minpoly"]) for w in rep.witnesses if isinstance(w["point"][1], dict)}
    assert minpolys == {("1", "0", "1"), ("1", "1", "1"), ("1", "-1", "1")}


def test_philippon_points_match_direct_heights():
    rep = run_finiteness_experiment(ExperimentConfig(height="philippon", cutoff="1"))
    got = {tuple(int(x) for x in w["cycle"]["components"][0]["point"]) for w in rep.witnesses}
    oracle = set()
    for v in _brute_points(1, 4):
        h = philippon_height(ProjectiveCycle(1, ((1, PointComponent(ProjectiveTuple(list(v)))),))).h_ph
        if h.upper <= 1:
            oracle.add(v)
        else:
            assert h.lower > 1
    assert got == oracle


def test_zero_cycles_rational_part():
    rep = run_finiteness_experiment(ExperimentConfig(target="zero_cycles", n=1, d=2, cutoff="log(2)"))
    rat = [w for w in rep.witnesses if all(isinstance(c["point"][1], str) for c in w["cycle"]["components"])]
    # 8 single points, C(4,2)+4 pairs of height-0 points, 4*4 mixed pairs
    assert len(rat) == 8 + 10 + 16
    lim = decimal.Context(prec=60).ln(2)
    for w in rep.witnesses:
        assert CertifiedValue.from_json(w["height"]).lower <= lim


def test_dynamics_power_map_and_chebyshev():
    sq = make_selfmap([{(2, 0): 1}, {(0, 2): 1}])
    for f in (sq, CHEB):
        rep = run_finiteness_experiment(ExperimentConfig(target="dynamics", n=1, cutoff="0", dyn_map=f))
        assert _pts(rep) == {(0, 1), (1, 0), (1, 1), (1, -1)}
        assert rep.soundness == "complete"


def test_divisors_are_a_sample():
    rep = run_finiteness_experiment(ExperimentConfig(target="divisors_p2", n=2, d=1, cutoff="1"))
    assert rep.soundness == "sound-sample" and rep.notes


def test_threshold_flag():
    th = threshold_proj(1, 1, 1)
    assert run_finiteness_experiment(ExperimentConfig(threshold=th)).below_threshold is True
    assert run_finiteness_experiment(ExperimentConfig(cutoff="5", threshold=th)).below_threshold is False


def test_reruns_and_round_trips(default_report):
    s = emit_report(default_report, "json")
    assert s == emit_report(run_finiteness_experiment(ExperimentConfig()), "json")
    assert ExperimentReport.from_json(json.loads(s)) == default_report
    cfg = ExperimentConfig(target="dynamics", n=1, cutoff="log 3", dyn_map=CHEB,
                           threshold=threshold_proj(1, 2, 1)).validate()
    assert ExperimentConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg


def test_render_formats(default_report):
    rows = list(csv.reader(io.StringIO(emit_report(default_report, "csv"))))
    assert rows[0] == ["kind", "lo", "hi", "count", "object", "height"]
    assert sum(r[0] == "witness" for r in rows) == 8
    md = emit_report(default_report, "markdown")
    assert "- witnesses: 8" in md and "- soundness: complete" in md
    with pytest.raises(DomainError):
        emit_report(default_report, "yaml")
    e = empty_report()
    assert ExperimentReport.from_json(json.loads(emit_report(e))) == e
    assert emit_report(e, "markdown").startswith("# Finiteness census")


def test_rendered_digits_are_justified(default_report):
    for r in csv.reader(io.StringIO(emit_report(default_report, "csv"))):
        if r[0] != "witness":
            continue
        h = CertifiedValue.from_json(next(w["height"] for w in default_report.witnesses
                                          if json.dumps({k: v for k, v in w.items() if k != "height"},
                                                        sort_keys=True) == r[4]))
        shown = Fraction(r[5])
        assert abs(shown - Fraction(h.mid)) <= Fraction(h.rad) + Fraction(1, 10 ** (len(r[5].split(".")[-1])))


def test_cutoff_parsing():
    assert parse_cutoff("log 2") == ("log", 2)
    assert parse_cutoff("3/2") == ("num", Fraction(3, 2))
    assert cutoff_str(parse_cutoff("log(5)")) == "log(5)"
    for bad in ("-1", "log(1/2)"):
        with pytest.raises(DomainError):
            parse_cutoff(bad)


@pytest.mark.parametrize("kw", [
    dict(target="curves"),
    dict(height="weil"),
    dict(n=4),
    dict(d=0),
    dict(buckets=0),
    dict(target="divisors_p2", n=1),
    dict(target="divisors_p2", n=2, d=4),
    dict(target="dynamics"),
    dict(target="dynamics", n=2, dyn_map=CHEB),
])
def test_config_validation(kw):
    with pytest.raises(DomainError):
        run_finiteness_experiment(ExperimentConfig(**kw))


def test_candidate_cap():
    assert sum(1 for _ in primitive_vectors(1, 2)) == 8
    with pytest.raises(DomainError):
        list(primitive_vectors(3, 40))
