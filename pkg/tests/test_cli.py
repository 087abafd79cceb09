import io
import json
import subprocess
import sys

import pytest

from momentkit.certify import Certificate
from momentkit.cli import run
from momentkit.hausdorff import Sequence1D
from momentkit.moments import AtomicMeasure, MomentSequence, moments_from_measure


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    text = out.getvalue()
    return code, text, (json.loads(text) if text.strip() else None)


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


TWO_ATOMS = {"num_vars": 1, "atoms": [{"point": [-0.5], "weight": 0.3}, {"point": [0.5], "weight": 0.7}]}


def test_gen_moments_matches_direct_summation(tmp_path):
    code, _, out = call("gen-moments", "--measure", write(tmp_path, "m.json", TWO_ATOMS), "--max-degree", "6")
    assert code == 0
    got = {tuple(e["exponent"]): e["value"] for e in out["moments"]}
    for n in range(7):
        assert got[(n,)] == pytest.approx(0.3 * (-0.5) ** n + 0.7 * 0.5 ** n, abs=1e-16)
    assert MomentSequence.from_json(out) == moments_from_measure(AtomicMeasure.from_json(TWO_ATOMS), 6)


def dirac_file(tmp_path, pt, D):
    L = moments_from_measure(AtomicMeasure.dirac(pt), D)
    return write(tmp_path, "L.json", L.to_json())


def test_check_psd_dirac(tmp_path):
    code, _, out = call("check-psd", "--moments", dirac_file(tmp_path, (0.5,), 4))
    assert code == 0 and out["passed"] is True


def test_check_psd_failure_reports_witness(tmp_path):
    path = write(tmp_path, "bad.json", MomentSequence.from_1d([1.0, 0.0, -1.0]).to_json())
    code, _, out = call("check-psd", "--moments", path)
    assert code == 1 and out["passed"] is False
    assert "x" in json.dumps(out)


def test_check_ball_violation(tmp_path):
    code, _, out = call("check-ball", "--moments", dirac_file(tmp_path, (2.0, 0.0), 4))
    assert code == 1
    eps = [v for v in out["violations"] if v["label"] == "eps=1;m=0,0;n=0,0"]
    assert eps and eps[0]["value"] == -3.0


def test_check_cone(tmp_path):
    path = dirac_file(tmp_path, (0.5,), 6)
    assert call("check-cone", "--moments", path, "--element", "x", "--T", "1")[0] == 0
    assert call("check-cone", "--moments", path, "--element", "x", "--T", "0.4")[0] == 1


def test_vnorm_and_support_bound(tmp_path):
    path = dirac_file(tmp_path, (0.5,), 8)
    code, _, out = call("vnorm", "--moments", path, "--element", "x", "--budget", "3")
    assert code == 0 and out["value"] == 0.5
    code, _, out = call("vnorm", "--moments", path, "--element", "x", "--kind", "root", "--budget", "2")
    assert code == 0 and out["value"] == pytest.approx(0.5)
    code, _, out = call("support-bound", "--moments", path, "--generators", "x", "--budget", "3")
    assert code == 0 and out["squared_radius"] == 0.25


def test_solve_1d(tmp_path):
    vals = [0.3 * (-0.5) ** n + 0.7 * 0.5 ** n for n in range(7)]
    code, _, out = call("solve-1d", "--input", write(tmp_path, "f.json", {"values": vals}))
    assert code == 0
    assert [a["location"] for a in out["atoms"]] == pytest.approx([-0.5, 0.5], abs=1e-8)
    assert out["rank"] == 2 and out["residual"] <= 1e-8
    code, _, out = call("solve-1d", "--input", write(tmp_path, "g.json", {"values": [1, 0, -1]}))
    assert code == 1 and out["status"] == "not-psd"


def test_certify_and_reverify(tmp_path):
    code, _, out = call("certify", "--target", "1 + x1^2", "--vars", "1", "--max-degree", "2")
    assert code == 0 and out["status"] == "verified" and out["residual"] == 0.0
    cert = Certificate.from_json(out)
    assert cert.combination() == cert.target
    code, _, again = call("verify-certificate", "--input", write(tmp_path, "c.json", out))
    assert code == 0 and again["status"] == "verified"
    out["coefficients"][0]["value"] += 1e-3
    code, _, bad = call("verify-certificate", "--input", write(tmp_path, "d.json", out))
    assert code == 1 and bad["residual"] >= 1e-3 - 1e-15


def test_certify_negative_somewhere_reports_counterexample():
    code, _, out = call("certify", "--target", "1 - x1 - x2", "--vars", "2")
    assert code == 1 and out["status"] == "no-certificate-exists"
    assert out["counterexample"]["value"] < 0


def test_certify_infeasible_wording():
    code, _, out = call("certify", "--target", "x1^2", "--vars", "1", "--max-degree", "2")
    assert code == 1
    assert "no certificate at degree <= 2" in json.dumps(out)
    assert "not positive" not in json.dumps(out)


def test_malformed_json_reports_position(tmp_path):
    path = write(tmp_path, "broken.json", '{"num_vars": 1,\n  "atoms": [,]}')
    code, _, out = call("gen-moments", "--measure", path, "--max-degree", "2")
    assert code == 2
    assert (out["line"], out["column"]) == (2, 13)


def test_degree_overflow_exit_code(tmp_path):
    code, _, out = call("vnorm", "--moments", dirac_file(tmp_path, (0.5,), 4), "--element", "x", "--budget", "5")
    assert code == 2
    assert (out["required"], out["available"]) == (12, 4)


def test_usage_errors():
    assert call("check-psd")[0] == 2
    assert call("no-such-command")[0] == 2
    assert call("certify", "--target", "1 + x3", "--vars", "1")[0] == 2


def test_fixtures_deterministic_and_well_formed():
    a = call("fixture", "--kind", "random-ball-atoms", "--seed", "1", "--vars", "2")[1]
    b = call("fixture", "--kind", "random-ball-atoms", "--seed", "1", "--vars", "2")[1]
    assert a == b
    bundle = json.loads(a)
    mu = AtomicMeasure.from_json(bundle["measure"])
    assert mu.total_mass == pytest.approx(1.0, abs=1e-12)
    assert all(sum(v * v for v in p) <= 1.0 for p in mu.points)
    uni = call("fixture", "--kind", "uniform-interval", "--max-degree", "6")[2]
    got = {tuple(e["exponent"])[0]: e["value"] for e in uni["moments"]["moments"]}
    assert got == {k: (1 / (k + 1) if k % 2 == 0 else 0.0) for k in range(7)}
    cases = call("fixture", "--kind", "paper-examples")[2]["cases"]
    assert any(c["name"] == "certificate-1-plus-x2" for c in cases)


def test_seed_environment_override(monkeypatch):
    monkeypatch.setenv("MOMENTKIT_SEED", "7")
    a = call("fixture", "--kind", "random-ball-atoms")[1]
    b = call("fixture", "--kind", "random-ball-atoms", "--seed", "7")[1]
    assert a == b


def test_golden_outputs_are_byte_identical(tmp_path):
    path = write(tmp_path, "m.json", TWO_ATOMS)
    runs = [call("gen-moments", "--measure", path, "--max-degree", "6")[1] for _ in range(2)]
    assert runs[0] == runs[1]
    runs = [call("certify", "--target", "2 + x1 - x2", "--vars", "2")[1] for _ in range(2)]
    assert runs[0] == runs[1]


def test_schema_round_trips(tmp_path):
    out = call("gen-moments", "--measure", write(tmp_path, "m.json", TWO_ATOMS), "--max-degree", "4")[2]
    assert MomentSequence.from_json(out).to_json() == out
    seq = Sequence1D([1.0, 0.5, 0.25])
    assert Sequence1D.from_json(json.loads(json.dumps(seq.to_json()))) == seq


def test_console_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "momentkit.cli", "certify", "--help"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    for flag in ("--target", "--region", "--vars", "--max-degree", "--cert-tol", "--seed"):
        assert flag in res.stdout
