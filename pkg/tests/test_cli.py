import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from normpencil.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


GAUSS_PROBLEM = {
    "factors": [
        {"field": "quad:-1", "b": "1", "roots": [{"e": "0"}]},
        {"field": "quad:-1", "b": "1", "roots": [{"e": "1"}]},
    ],
    "S": [2],
    "targets": {"2": {"lambda": "5", "mu": "1", "precision": 1}},
}


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(path)


def test_hilbert():
    assert call("hilbert", "-1", "-1", "2")[:2] == (0, "1/2\n")
    assert call("hilbert", "2", "7", "7")[:2] == (0, "0\n")


def test_norm():
    code, out, _ = call("norm", "solve", "-1", "5")
    x, y = map(Fraction, out.split())
    assert code == 0 and x * x + y * y == 5
    assert call("norm", "solve", "-1", "3")[0] == 2
    assert call("norm", "test", "2", "-1")[1] == "true\n"


def test_invariant_and_reciprocity():
    assert call("invariant", "quad:-1", "3", "3")[1] == "1/2\n"
    code, out, _ = call("reciprocity", "chi:7:3=1/3", "14/5")
    data = json.loads(out)
    assert code == 0 and data["sum"] == "0" and set(data["invariants"]) >= {"inf", "2", "5", "7"}


def test_tau():
    code, out, _ = call("tau", "--S", "2", "--targets", "2=3", "--e", "0", "--precisions", "2=2", "--field", "quad:-1")
    data = json.loads(out)
    assert code == 0 and all(s["ok"] for s in data["splitting"])
    assert data["augmented"] and int(data["assignments"][0]["p"]) % 4 == 3


def test_constellation():
    code, out, _ = call("constellation", "--form", "1,0", "--form", "1,-2", "--cone", "1,-3", "--cone", "0,1")
    assert code == 0 and json.loads(out) == [{"point": [5, 1], "primes": [5, 3]}]
    assert call("constellation", "--form", "1,0", "--form", "1,0,1", "--cone", "1,0")[0] == 2
    assert call("constellation", "--form", "1,0", "--form", "1,-2", "--cone", "1,-3", "--max-radius", "0")[0] == 3


def test_solve_verify_round_trip(tmp_path):
    problem = write(tmp_path, "p.json", GAUSS_PROBLEM)
    code, first, _ = call("solve", problem)
    assert code == 0
    assert call("solve", problem)[1] == first
    cert = write(tmp_path, "c.json", first)
    code, out, _ = call("verify", problem, cert)
    assert code == 0 and json.loads(out) == {"ok": True, "failures": [], "vertical_invariants_vanish": True}
    out_path = tmp_path / "c2.json"
    assert call("solve", problem, "-o", str(out_path))[0] == 0
    assert out_path.read_text() == first


def test_verify_failure_exit_code(tmp_path):
    problem = write(tmp_path, "p.json", GAUSS_PROBLEM)
    cert = json.loads(call("solve", problem)[1])
    cert["coordinates"][0][0] = "7"
    code, out, _ = call("verify", problem, write(tmp_path, "c.json", cert))
    assert code == 4 and not json.loads(out)["ok"]


def test_obstruction_exit_code(tmp_path):
    problem = {"factors": [{"field": "quad:-1", "b": "21", "roots": [{"e": "0", "m": 2}]}]}
    code, _, err = call("solve", write(tmp_path, "p.json", problem))
    assert code == 2 and err.startswith("error: LOCAL_OBSTRUCTION")


def test_usage_and_io_errors(tmp_path):
    assert call("solve", str(tmp_path / "missing.json"))[0] == 64
    assert call("solve", write(tmp_path, "bad.json", "{"))[0] == 64
    assert call("frobnicate")[0] == 64
    assert call("hilbert", "0", "1", "2")[0] == 64
    assert call()[0] == 64


def test_threads_flag_is_accepted():
    assert call("--threads", "4", "hilbert", "3", "5", "inf")[:2] == (0, "0\n")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "normpencil", "hilbert", "-1", "-1", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1/2\n"
