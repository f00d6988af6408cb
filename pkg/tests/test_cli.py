"""Command-line surface: compute commands, exit codes, report determinism."""

import json

import numpy as np
import pytest

from ncgeo import core
from ncgeo.cli import main
from ncgeo.core import TracialAlgebra
from ncgeo.geometry import exp_curve
from ncgeo.serialization import canonical_dumps, curve_to_json, matrix_to_json


def _write(path, obj):
    path.write_text(canonical_dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return tmp_path


def test_distance_one_to_minus_one(files, capsys):
    one = _write(files / "u.json", matrix_to_json(np.eye(2)))
    minus = _write(files / "v.json", matrix_to_json(-np.eye(2)))
    assert main(["distance", "--u", one, "--v", minus, "--p", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["d_p"] == pytest.approx(np.pi, abs=1e-12)


def test_project_onto_zero_subspace_returns_input(files, capsys, rng, m3):
    z = core.random_skew(m3, rng)
    zp = _write(files / "z.json", matrix_to_json(z))
    sub = _write(
        files / "g.json",
        {"ambient": {"blocks": [3], "weights": [1.0], "tensor_m2": False}, "kind": "basis", "basis": []},
    )
    assert main(["project", "--z", zp, "--subspace", sub, "--p", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    resid = np.array(out["residual"]["re"]) + 1j * np.array(out["residual"]["im"])
    assert np.allclose(resid, z, atol=1e-14)
    assert out["optimality_residual"] == 0.0


def test_fold_command(files, capsys):
    z = _write(files / "z.json", matrix_to_json(np.diag([3 * np.pi / 2, 0.0])))
    assert main(["fold", "--z", z]) == 0
    out = json.loads(capsys.readouterr().out)
    diag = np.diag(np.array(out["folded"]["re"]))
    assert np.allclose(diag, [-np.pi / 2, 0.0], atol=1e-12)


def test_qdistance_and_geodesic_commands(files, capsys, rng):
    space = _write(files / "s.json", {"kind": "diag-m2", "blocks": [2], "p_list": [2, 4]})
    alg = TracialAlgebra.tensor_square(2)
    u = _write(files / "u.json", matrix_to_json(np.eye(4)))
    z = core.random_skew(alg, rng, 0.3)
    z[:2, :2] = 0
    z[2:, 2:] = 0
    target = _write(files / "t.json", matrix_to_json(core.unitary_exp(z)))
    assert main(["qdistance", "--space", space, "--u", u, "--v", target, "--p", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["qd_p"] == pytest.approx(core.p_norm(z, 4, alg), abs=1e-6)
    assert main(["geodesic", "--space", space, "--target", target, "--p", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["length_p"] == pytest.approx(core.p_norm(z, 4, alg), abs=1e-6)
    assert out["minimality_certificate"] < 1e-8


def test_lift_command(files, capsys, rng):
    space = _write(files / "s.json", {"kind": "diag-m2", "blocks": [2], "p_list": [2, 4]})
    alg = TracialAlgebra.tensor_square(2)
    z = core.random_skew(alg, rng, 0.3)
    curve = _write(files / "c.json", curve_to_json(exp_curve(z, 33)))
    assert main(["lift", "--space", space, "--curve", curve, "--p", "4", "--epsilon", "1e-2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["length_p"] < out["quotient_length_p"] + 1e-2 + 1e-5
    assert out["ode_defect"] < 1e-6


def test_usage_errors(files, capsys):
    bad = _write(files / "bad.json", {"n": 2, "re": [[0.0, 0.0]], "im": [[0.0, 0.0]]})
    good = _write(files / "good.json", matrix_to_json(np.eye(2)))
    assert main(["distance", "--u", bad, "--v", good, "--p", "2"]) == 2
    assert "re/im" in capsys.readouterr().err
    # non-unitary input surfaces the precondition by name
    herm = _write(files / "h.json", matrix_to_json(np.diag([2.0, 1.0])))
    assert main(["distance", "--u", herm, "--v", good, "--p", "2"]) == 2
    assert "unitary" in capsys.readouterr().err
    assert main(["distance", "--u", good, "--v", good]) == 2  # missing --p
    assert main(["nonsense"]) == 2
    assert main(["distance", "--u", str(files / "missing.json"), "--v", good, "--p", "2"]) == 2


def test_verify_config_rejections(files, capsys):
    cfg = _write(files / "cfg.json", {"trials": 0})
    assert main(["verify", "--config", cfg]) == 2
    cfg = _write(files / "cfg2.json", {"tolerances": {"clarkson": -1.0}})
    assert main(["verify", "--config", cfg]) == 2
    cfg = _write(files / "cfg3.json", {"bogus": 1})
    assert main(["verify", "--config", cfg]) == 2


def test_verify_runs_and_is_deterministic(files, capsys, monkeypatch):
    cfg = _write(
        files / "cfg.json",
        {"seed": 7, "dims": [2], "p_list": [2], "trials": 3, "suites": ["core", "projection"]},
    )
    r1 = files / "r1.json"
    r2 = files / "r2.json"
    assert main(["verify", "--config", cfg, "--report", str(r1)]) == 0
    # a different worker-pool size must not change a single byte
    monkeypatch.setenv("NCGEO_THREADS", "4")
    assert main(["verify", "--config", cfg, "--report", str(r2)]) == 0
    assert r1.read_bytes() == r2.read_bytes()
    rep = json.loads(r1.read_text())
    assert rep["passed"] is True
    assert rep["violations"] == 0
    assert all("runtime_s" not in r for r in rep["records"])


def test_verify_exit_one_on_violation(files, monkeypatch):
    # an absurdly tight tolerance forces a recorded violation
    cfg = _write(
        files / "cfg.json",
        {
            "seed": 7,
            "dims": [2],
            "p_list": [2],
            "trials": 3,
            "suites": ["core"],
            "tolerances": {"roundtrip": 1e-300},
        },
    )
    assert main(["verify", "--config", cfg, "--report", str(files / "r.json")]) == 1
