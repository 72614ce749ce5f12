import json

import pytest

from combatlas.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_mason_equality(capsys, data_dir):
    code, rep = run_json(capsys, "mason", data_dir / "u24.json", "--k", "1", "--strong")
    assert code == 0 and rep["verdict"] is True
    assert rep["result"]["slack"] == "0" and rep["result"]["equality"]
    assert rep["config"]["seed"] == 0 and rep["config"]["t_samples"] == ["0", "1/4", "1/2", "3/4", "1"]


def test_mason_atlas_route(capsys, data_dir):
    code, rep = run_json(capsys, "mason", data_dir / "k4.json", "--k", "2", "--strong", "--atlas-route")
    assert code == 0 and any(c["name"] == "atlas_vertices" for c in rep["checks"])


def test_recognize_nonmatroid(capsys, data_dir):
    code, rep = run_json(capsys, "recognize", data_dir / "nonmatroid.json")
    assert code == 1 and rep["verdict"] is False
    atlas_check = next(c for c in rep["checks"] if c["name"] == "atlas_test")
    assert atlas_check["witness"]["matrix"] == [[0, 0, 0, 1], [0, 0, 1, 1], [0, 1, 0, 1], [1, 1, 1, 1]]


def test_lorentzian_witness(capsys, data_dir):
    code, rep = run_json(capsys, "lorentzian", data_dir / "squares.json", "--witness")
    assert code == 1 and rep["checks"][0]["witness"]["reason"] == "support not M-convex"


def test_hessian_inertia(capsys, data_dir):
    code, rep = run_json(capsys, "hessian", data_dir / "e3.json", "--at", "1,2,1/2")
    assert code == 0 and rep["result"]["inertia"] == [1, 2, 0]


def test_mixvol_and_af(capsys, data_dir):
    code, rep = run_json(capsys, "mixvol", data_dir / "boxes.json", "--select", "A,B,C")
    assert code == 0 and rep["result"]["mixed_volume"] == pytest.approx(49 / 6)
    code, rep = run_json(capsys, "af", data_dir / "rects.json", "--A", "A", "--B", "B")
    assert code == 0 and rep["result"]["V_AB"] == pytest.approx(3.5)
    code, rep = run_json(capsys, "af", data_dir / "boxes.json", "--A", "A", "--B", "B", "--P", "C")
    assert code == 0


def test_af_perturb(capsys, data_dir):
    # Q = A + B is a 4x3 box: V = V(A,B) + eps (V(A,Q) + V(B,Q)) + eps^2 area(Q)
    code, rep = run_json(capsys, "af", data_dir / "rects.json", "--A", "A", "--B", "B", "--perturb", "0.01")
    assert code == 0 and rep["result"]["V_AB"] == pytest.approx(3.5 + 0.01 * 12 + 1e-4 * 12)


def test_bm_trace(capsys, data_dir):
    code, rep = run_json(capsys, "bm", data_dir / "brickA.json", data_dir / "brickB.json", "--trace")
    assert code == 0 and rep["result"]["trace"]["max_depth"] == 1


def test_atlas_verify(capsys, data_dir):
    code, rep = run_json(capsys, "atlas", "verify", data_dir / "u34_atlas.json")
    assert code == 0 and rep["result"]["regular"] > 0


def test_input_errors_exit_2(capsys, data_dir, tmp_path):
    code, _, err = run(capsys, "mason", data_dir / "bad.json", "--k", "1")
    assert code == 2 and "bad.json:2:" in err
    code, _, _ = run(capsys, "mason", data_dir / "u24.json", "--k", "5")
    assert code == 2
    code, _, _ = run(capsys, "nosuch")
    assert code == 2
    code, _, _ = run(capsys, "mason", data_dir / "u24.json", "--k", "1", "--t-samples", "0,2")
    assert code == 2
    code, _, _ = run(capsys, "mixvol", data_dir / "boxes.json", "--select", "A,B")
    assert code == 2


def test_json_reports_are_reproducible(capsys, data_dir):
    args = ("af", data_dir / "rects.json", "--A", "A", "--B", "B", "--perturb", "0.1", "--format", "json")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second and "timing_s" not in first


def test_timing_flag(capsys, data_dir):
    code, rep = run_json(capsys, "bm", data_dir / "brickA.json", data_dir / "brickB.json", "--timing")
    assert "timing_s" in rep
