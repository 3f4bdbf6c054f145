import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from poisson_coh.cli import main, parse_range

DATA = Path(__file__).parent / "data"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_parse_range():
    assert parse_range("0..3") == [0, 1, 2, 3]
    assert parse_range("-2..-1") == [-2, -1]
    assert parse_range("5") == [5]


def test_hp_symplectic2_table():
    code, text = run("hp", "--example", "symplectic2", "--method", "lp", "--degrees", "0..2", "--weights", "0..4")
    assert code == 0
    doc = json.loads(text)
    assert doc["tool"] == "poisson-coh" and len(doc["structure"]["sha256"]) == 64
    rows = {(r["degree"], r["weight"]): r for r in doc["rows"]}
    assert rows[(1, 0)]["dim"] == 3
    assert rows[(0, 2)]["dim"] is None and rows[(0, 0)]["dim_extended"] == 1


def test_hp_sl2star_vanishing():
    code, text = run("hp", "--example", "sl2star", "--method", "lp", "--degrees", "0..3", "--weights", "0..8")
    assert code == 0
    rows = json.loads(text)["rows"]
    # with degree 0 included, HP^1 and HP^2 vanish; without it, degree 1 keeps the non-Hamiltonian cocycles
    assert all(r["dim_extended"] == 0 for r in rows if r["degree"] in (1, 2))
    assert all(r["dim"] == 0 for r in rows if r["degree"] == 2)
    assert [r["weight"] for r in rows if r["degree"] == 0 and r["dim_extended"]] == [0, 4, 8]


def test_hp_cone_harrison():
    code, text = run("hp", "--example", "a1cone", "--method", "harrison", "--hp", "2", "--trunc", "8",
                     "--require-stable")
    assert code == 0
    rows = json.loads(text)["rows"]
    ones = [r for r in rows if r["dim"] == 1]
    assert len(ones) == 1 and ones[0]["weight"] == -6
    assert all(r["dim"] == 0 for r in rows if r is not ones[0])


def test_hp_unstable_exit_code():
    # at D=4 the cone's class has not appeared yet at D-1, so the row is unstable
    code, text = run("hp", "--example", "a1cone", "--method", "harrison", "--hp", "2", "--trunc", "4",
                     "--weights=-6..-6", "--require-stable")
    rows = json.loads(text)["rows"]
    assert code == 3 and rows[0]["stable"] is False


def test_hp_csv_projection():
    code, text = run("hp", "--example", "symplectic2", "--degrees", "1..1", "--weights", "0..1", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["dim"] for r in rows] == ["3", "4"]


@pytest.mark.parametrize("argv", [
    ("hp", "--example", "a1cone", "--method", "lp"),
    ("hp", "--example", "symplectic2", "--method", "harrison"),
    ("hp", "--example", "symplectic2", "--weights", "3..1"),
    ("hp", "--structure", str(DATA / "bad.json")),
    ("hp", "--structure", str(DATA / "missing.json")),
    ("hp",),
    ("nonsense",),
])
def test_input_errors_exit_2(argv, capsys):
    code, _ = run(*argv)
    assert code == 2


def test_verify_pass():
    code, text = run("verify", "--example", "sl2star")
    doc = json.loads(text)
    assert code == 0 and doc["ok"] and doc["certificate"]["jacobi"]["triples_checked"] == 1


def test_verify_bad_structure():
    code, text = run("verify", "--structure", str(DATA / "bad.json"))
    doc = json.loads(text)
    assert code == 1
    assert doc["certificate"]["jacobi"]["counterexample"]["triple"] == ["x", "y", "z"]


def test_verify_deformation_counterexample():
    code, text = run("verify", "--example", "symplectic4", "--deformation", str(DATA / "psi13.json"))
    cx = json.loads(text)["certificate"]["deformation"]["counterexample"]
    assert code == 1
    assert cx["condition"] == "star_star"
    assert sorted(cx["triple"]) == ["x1", "x2", "x3"] and cx["discrepancy"] in ("1", "-1")


def test_deform_cone():
    code, text = run("deform", "--example", "a1cone", "--weights=-8..0", "--trunc", "6")
    doc = json.loads(text)
    assert code == 0 and doc["params"]["route"] == "direct"
    counts = {r["weight"]: r["classes"] for r in doc["rows"]}
    assert counts[-6] == 1 and sum(counts.values()) == 1


@pytest.mark.parametrize("argv", [
    ("hp", "--example", "symplectic4", "--degrees", "0..2", "--weights", "0..2"),
    ("hp", "--example", "a1cone", "--method", "harrison", "--hp", "2", "--trunc", "6"),
    ("verify", "--example", "symplectic4", "--deformation", str(DATA / "psi13.json")),
    ("deform", "--example", "a1cone", "--weights=-6..-4", "--trunc", "6"),
])
def test_byte_identical_reruns(argv):
    assert run(*argv) == run(*argv)


def test_parallel_matches_serial():
    argv = ("hp", "--example", "sl2star", "--degrees", "0..3", "--weights", "0..4")
    assert run(*argv, "--jobs", "2") == run(*argv)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "poisson_coh.cli", "verify", "--example", "symplectic2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["ok"]
