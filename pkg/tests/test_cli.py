import json
import subprocess
import sys

import pytest

from _support import fixture_table
from khtwist.cli import EXIT_CAP, EXIT_DIFFERENT, EXIT_OK, EXIT_PARSE, main
from khtwist.homology import HomologyTable, compute
from khtwist.diagram import parse_braid


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_unknot(capsys):
    code, out, _ = run(capsys, "compute", "--pd", "fixtures/unknot.pd")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("unknot: 0 crossings")
    assert out.splitlines()[1].split() == ["u\\q", "-1", "1"]


def test_compute_family_json(capsys):
    code, out, _ = run(capsys, "compute", "--family", "n=1 k=1", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert HomologyTable.from_json(out) == fixture_table("8_9")
    assert data["knot"] == 'family n=1 T="" U="" k=1'


def test_compute_braid_matches_pd(capsys):
    code, out, _ = run(capsys, "compute", "--braid", "s1 s1 s1", "--strands", "2", "--format", "json")
    assert code == EXIT_OK
    assert HomologyTable.from_json(out) == compute(parse_braid("s1 s1 s1", 2))
    # default strand count
    _, again, _ = run(capsys, "compute", "--braid", "s1 s1 s1", "--format", "json")
    assert json.loads(again)["homology"] == json.loads(out)["homology"]


def test_compute_diagonals(capsys):
    code, out, _ = run(capsys, "compute", "--pd", "4_1.pd", "--diagonals")
    assert code == EXIT_OK and "(width 2)" in out
    _, js, _ = run(capsys, "compute", "--pd", "4_1.pd", "--diagonals", "--format", "json")
    assert json.loads(js)["diagonals"] == {"values": [-1, 1], "width": 2}


def test_compare_equal_and_different(capsys):
    code, out, _ = run(capsys, "compare", "--family", "n=1 k=0", "--family", "n=1 k=2")
    assert code == EXIT_OK and out.strip().endswith("equal")
    code, out, _ = run(capsys, "compare", "--pd", "4_1.pd", "--pd", "5_2.pd", "--format", "json")
    assert code == EXIT_DIFFERENT
    data = json.loads(out)
    assert data["equal"] is False and data["diff"]


def test_compare_needs_two(capsys):
    code, _, err = run(capsys, "compare", "--pd", "4_1.pd")
    assert code == EXIT_PARSE and "expects 2" in err


def test_family_gcd(capsys):
    code, out, _ = run(capsys, "family", "n=2", "--l", "3", "5")
    assert code == EXIT_OK
    assert "l=3 gcd(l,5)=1" in out and "l=5 gcd(l,5)=5" in out
    _, js, _ = run(capsys, "family", "n=1", "--max-k", "2", "--format", "json")
    rows = json.loads(js)["family"]
    assert [r["crossings"] for r in rows] == [8, 10, 12]
    assert rows[0]["gcd"] == 3 and rows[1].get("l") is None


def test_jones_and_homfly(capsys):
    code, out, _ = run(capsys, "jones", "--family", "n=1 k=0", "--family", "n=1 k=1")
    assert code == EXIT_OK and out.strip().endswith("equal")
    code, out, _ = run(capsys, "homfly", "--family", "n=1 k=0", "--family", "n=1 k=1")
    assert code == EXIT_DIFFERENT and out.strip().endswith("distinct")
    code, out, _ = run(capsys, "homfly", "--pd", "3_1.pd", "--format", "json", "--seed", "3")
    assert code == EXIT_OK and len(json.loads(out)["inputs"]) == 1


def test_les_check(capsys):
    code, out, _ = run(capsys, "les-check", "--pd", "4_1.pd", "--crossing", "1")
    assert code == EXIT_OK
    assert "chain-level SES: match" in out and out.count("exact") >= 2
    code, out, _ = run(capsys, "les-check", "--pd", "3_1.pd", "--format", "json")
    data = json.loads(out)
    assert data["exactness"]["exact"] and data["ses"]["ok"]


@pytest.mark.parametrize("argv", [
    ["compute", "--pd", "no_such_file.pd"],
    ["compute", "--braid", "s1 x2"],
    ["compute", "--family", "n=0"],
    ["les-check", "--pd", "unknot.pd"],
])
def test_parse_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_PARSE and err.startswith("kh: ")


def test_cap(capsys, monkeypatch):
    code, _, err = run(capsys, "compute", "--pd", "8_9.pd", "--cap", "6")
    assert code == EXIT_CAP and "kh:" in err
    monkeypatch.setenv("KH_CAP", "3")
    assert run(capsys, "compute", "--pd", "4_1.pd")[0] == EXIT_CAP
    assert run(capsys, "compute", "--pd", "4_1.pd", "--cap", "4")[0] == EXIT_OK


def test_rational_and_local(capsys):
    _, z, _ = run(capsys, "compute", "--pd", "trefoil_left.pd", "--format", "json")
    _, q, _ = run(capsys, "compute", "--pd", "trefoil_left.pd", "--format", "json", "--coefficients", "q")
    _, loc, _ = run(capsys, "compute", "--pd", "trefoil_left.pd", "--format", "json", "--engine", "local")
    assert z == loc
    assert "2" not in [str(t) for r in json.loads(q)["homology"] for t in r["torsion"]]


def _kh(*argv):
    return subprocess.run([sys.executable, "-m", "khtwist.cli", *argv], capture_output=True, text=True)


def test_json_is_deterministic_across_runs_and_threads():
    outs = {_kh("compute", "--pd", "8_8.pd", "--format", "json", "--threads", str(t)).stdout for t in (1, 1, 2)}
    assert len(outs) == 1 and json.loads(outs.pop())["homology"]
    fam = {_kh("family", "n=1", "--format", "json").stdout for _ in range(2)}
    assert len(fam) == 1


def test_entry_point_exit_code():
    proc = _kh("compute", "--pd", "missing.pd")
    assert proc.returncode == EXIT_PARSE
