import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from qdesign.certificate import dumps, encode_complex, load_schema
from qdesign.cli import run
from qdesign.geometry import cyclic_square

CERT_SCHEMA = load_schema("certificate")


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def check_certificate(c):
    jsonschema.validate(c, CERT_SCHEMA)
    assert c["pass"] == all(v <= c["tol"] for v in c["deviations"].values())
    assert json.loads(dumps(c)) == c


@pytest.mark.parametrize("argv", [
    ("field", "--order", 9), ("plane", "--order", 4), ("mols", "--order", 5),
    ("mub", "--order", 5), ("net", "--order", 3), ("toy", "--order", 3),
])
def test_passing_commands(capsys, argv):
    code, c, _ = call(capsys, *argv)
    assert code == 0 and c["pass"]
    check_certificate(c)


def test_mub_order3(capsys):
    code, c, _ = call(capsys, "mub", "--order", 3)
    assert code == 0 and c["subject"] == "mub"
    assert len(c["artifact"]["bases"]) == 4
    jsonschema.validate(c["artifact"], load_schema("mub_set"))
    _, c2, _ = call(capsys, "mub", "--order", 3, "--check-only")
    assert "artifact" not in c2 and c2["pass"]


def test_plane_order6_invalid(capsys):
    code, c, err = call(capsys, "plane", "--order", 6)
    assert code == 2 and c is None
    assert "6 is not a prime power" in err


def test_usage_errors(capsys):
    assert call(capsys, "plane")[0] == 2
    assert call(capsys, "bogus")[0] == 2
    assert call(capsys, "mub", "--order", 4)[0] == 2
    assert call(capsys, "sic", "verify", "--input", "/nonexistent.json")[0] == 2


def test_plane_artifact_schema(capsys):
    _, c, _ = call(capsys, "plane", "--order", 3)
    jsonschema.validate(c["artifact"], load_schema("incidence_structure"))
    assert len(c["artifact"]["striations"]) == 4


def test_sic_search_verify_and_tamper(capsys, tmp_path):
    out = tmp_path / "sic.json"
    code, _, _ = call(capsys, "sic", "search", "--dim", 3, "--seed", 1, "--out", out)
    assert code == 0
    c = json.loads(out.read_text())
    check_certificate(c)
    jsonschema.validate(c["artifact"], load_schema("sic_candidate"))
    assert c["seed"] == 1

    code, v, _ = call(capsys, "sic", "verify", "--input", out, "--tol", 1e-10)
    assert code == 0 and v["pass"]

    c["artifact"]["vectors"][2][0][0] += 0.1
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(c))
    code, v, err = call(capsys, "sic", "verify", "--input", bad)
    assert code == 1 and not v["pass"]
    worst = max(v["deviations"], key=v["deviations"].get)
    assert worst in err


def test_sic_verify_accepts_bare_candidate(capsys, tmp_path):
    from qdesign.sic import sic_dim2_exact

    p = tmp_path / "tet.json"
    p.write_text(json.dumps(sic_dim2_exact().to_json()))
    code, v, _ = call(capsys, "sic", "verify", "--input", p, "--tol", 1e-12)
    assert code == 0 and v["deviations"]["rank_deficit"] == 0


def test_sic_search_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    call(capsys, "sic", "search", "--dim", 4, "--seed", 5, "--out", a)
    call(capsys, "sic", "search", "--dim", 4, "--seed", 5, "--jobs", 2, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_dual_solve_and_verify(capsys, tmp_path):
    s, b = tmp_path / "sic.json", tmp_path / "b.json"
    call(capsys, "sic", "search", "--dim", 2, "--seed", 0, "--out", s)
    code, _, _ = call(capsys, "dual", "solve", "--sic", s, "--order", 2, "--out", b)
    assert code == 0
    c = json.loads(b.read_text())
    check_certificate(c)
    jsonschema.validate(c["artifact"], load_schema("b_assignment"))
    assert "conditions" in c["report"]
    code, v, _ = call(capsys, "dual", "verify", "--input", b, "--tol", 1e-8)
    check_certificate(v)
    assert code == (0 if v["pass"] else 1)
    assert call(capsys, "dual", "solve", "--sic", s, "--order", 3)[0] == 2


def test_mate_command(capsys, tmp_path):
    sq = tmp_path / "sq.json"
    sq.write_text(json.dumps({"square": [list(r) for r in cyclic_square(3).cells]}))
    code, c, _ = call(capsys, "mate", "--input", sq)
    assert code == 0 and c["report"]["status"] == "found" and "mate" in c["artifact"]
    sq.write_text(json.dumps([list(r) for r in cyclic_square(6).cells]))
    code, c, _ = call(capsys, "mate", "--input", sq, "--budget", 3)
    assert code == 1 and c["report"]["status"] == "budget_exhausted"
    sq.write_text(json.dumps([[0, 1], [0, 1]]))
    assert call(capsys, "mate", "--input", sq)[0] == 2


def test_net_with_state(capsys, tmp_path):
    rho = tmp_path / "rho.json"
    rho.write_text(json.dumps({"rho": encode_complex(np.diag([0.5, 0.3, 0.2]))}))
    code, c, _ = call(capsys, "net", "--order", 3, "--state", rho)
    assert code == 0
    assert c["deviations"]["born"] < 1e-10 and len(c["report"]["wigner"]) == 9
    rho.write_text(json.dumps(encode_complex(np.eye(3))))
    assert call(capsys, "net", "--order", 3, "--state", rho)[0] == 2


def test_toy_simulation_reproducible(capsys):
    _, a, _ = call(capsys, "toy", "--order", 2, "--simulate", 0, 1, "--trials", 5000, "--seed", 3)
    _, b, _ = call(capsys, "toy", "--order", 2, "--simulate", 0, 1, "--trials", 5000, "--seed", 3)
    assert a == b and a["seed"] == 3
    assert a["report"]["simulation"]["exact"] == "1/3"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qdesign", "mub", "--order", "2", "--check-only"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["pass"]
