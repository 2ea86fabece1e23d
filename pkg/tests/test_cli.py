import json
import shutil
import subprocess
from decimal import Decimal

import mpmath
import pytest

from nkit.cli import EXIT_DOMAIN, EXIT_OK, EXIT_RESOURCE, main
from nkit.certified import CertifiedValue

SQUARE = '[{"2,0": 1}, {"0,2": 1}]'
QUAD = '[{"2,0": 1, "0,2": 1}, {"0,2": 2}]'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_OK, err
    return json.loads(out)


def test_height_of_number_and_tuple(capsys):
    for inp in ("2", '["1", "2"]'):
        v = CertifiedValue.from_json(run_json(capsys, "height", "--input", inp))
        assert v.contains(Decimal("0.69314718055994530941723212145817656807550013436"))


def test_mahler(capsys):
    assert CertifiedValue.from_json(run_json(capsys, "mahler", "--poly", "[1, 1, 1]")).contains(0)
    l2 = CertifiedValue.from_json(run_json(capsys, "mahler", "--l2chi3"))
    mpmath.mp.dps = 40
    L = (mpmath.zeta(2, mpmath.mpf(1) / 3) - mpmath.zeta(2, mpmath.mpf(2) / 3)) / 9
    assert l2.contains(Decimal(str(3 * mpmath.sqrt(3) / (4 * mpmath.pi) * L)), slack=Decimal("1e-35"))


def test_northcott_and_tower(capsys):
    b = run_json(capsys, "northcott", "bound", "--C", "0", "--d", "2", "--direction", "upper")
    assert abs(float(b["aggregate"]["mid"]) - 1.3862943611198906) < 1e-15
    t = run_json(capsys, "tower", "build", "--t", "1", "--count", "3")
    assert [s["p"] for s in t["steps"]] == ["7", "53", "389"] and t["primality"] == "proven"


def test_chow_and_philippon(capsys):
    cyc = '{"n": 1, "components": [{"mult": 1, "point": ["1", "2"]}]}'
    assert run_json(capsys, "chow", "--cycle", cyc)
    h = run_json(capsys, "philippon", "--cycle", cyc)
    t = run_json(capsys, "philippon", "--cycle", cyc, "--tilde")
    assert h and t


def test_dyn_commands(capsys):
    c = run_json(capsys, "dyn", "canonical", "--map", QUAD, "--point", '["3", "1"]', "--tol", "1e-8")
    assert float(c["value"]["rad"]) <= 1e-8
    assert run_json(capsys, "dyn", "gap", "--map", SQUARE)
    k = run_json(capsys, "dyn", "constants", "--n", "1", "--D", "2")
    assert int(k["C2"]) == 3 * 4**64 and k["C1"] == "20"


def test_cm_commands(capsys):
    assert run_json(capsys, "cm", "classpoly", "--disc", "-7")["coefficients"] == ["3375", "1"]
    rows = run_json(capsys, "cm", "profile", "--max-disc", "20")["rows"]
    assert [r["disc"] for r in rows][:3] == [-3, -4, -7]
    code, out, _ = run(capsys, "cm", "profile", "--max-disc", "20", "--format", "csv")
    assert code == EXIT_OK and out.splitlines()[0].startswith("disc")


@pytest.mark.parametrize("which,args", [
    ("proj", []),
    ("abvar", ["--d", "16", "--n", "3"]),
    ("dyn", ["--D", "2"]),
    ("main", ["--d", "2", "--R", "3"]),
])
def test_threshold_commands(capsys, which, args):
    r = run_json(capsys, "threshold", which, *args)
    assert "exact" in r and "threshold" in r


def test_experiment_and_out_file(capsys, tmp_path):
    r = run_json(capsys, "experiment")
    assert r["total"] == 8 and r["soundness"] == "complete"
    out = tmp_path / "census.md"
    code, stdout, _ = run(capsys, "experiment", "--target", "dynamics", "--map", SQUARE, "--cutoff", "0",
                          "--format", "markdown", "--out", str(out))
    assert code == EXIT_OK and stdout == ""
    assert "- witnesses: 4" in out.read_text()
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"target": "points", "n": 2, "cutoff": "0"}))
    assert run_json(capsys, "experiment", "--config", f"@{cfg}")["total"] == 13


@pytest.mark.parametrize("argv", [
    ["chow", "--cycle", "{}"],
    ["philippon", "--cycle", "not json"],
    ["threshold", "dyn", "--D", "1"],
    ["threshold", "proj", "--C", "0"],
    ["cm", "classpoly", "--disc", "-6"],
    ["dyn", "canonical", "--map", SQUARE, "--point", '["1", "2"]', "--tol", "0"],
    ["experiment", "--n", "9"],
])
def test_domain_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_DOMAIN and out == "" and err.startswith("nkit: ")


def test_resource_error_exits_3(capsys):
    code, _, err = run(capsys, "dyn", "canonical", "--map", QUAD, "--point", '["3", "1"]', "--tol", "1e-3000")
    assert code == EXIT_RESOURCE and "resource limit" in err


def test_precision_flag_changes_radius(capsys):
    lo = CertifiedValue.from_json(run_json(capsys, "height", "--input", "3", "--precision-bits", "64"))
    hi = CertifiedValue.from_json(run_json(capsys, "height", "--input", "3", "--precision-bits", "256"))
    assert hi.rad < lo.rad and lo.overlaps(hi)
    with pytest.raises(SystemExit):
        main(["height", "--input", "3", "--precision-bits", "8"])


@pytest.mark.skipif(shutil.which("nkit") is None, reason="console script not installed")
def test_console_script():
    p = subprocess.run(["nkit", "threshold", "main", "--d", "2", "--R", "3"], capture_output=True, text=True)
    assert p.returncode == 0
    assert json.loads(p.stdout)["exact"] == {"log2_coeff": "0", "rational": "8"}
