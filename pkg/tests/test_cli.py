"""Command-line interface: reports, formats, exit codes, determinism."""

import json
import math
import pathlib

import pytest

from adsvol.cli import main

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
CYLINDER = str(DATA / "cylinder.json")
CONE_SLAB = str(DATA / "cone_slab.json")
STRIP = str(DATA / "strip2d.json")
SQUARE = str(DATA / "polygon_square.json")
BULGE = str(DATA / "polygon_bulge.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out.strip() else None), err


# --- classify -----------------------------------------------------------------


def test_classify_cylinder(capsys):
    code, rep, _ = run_json(capsys, "classify", CYLINDER)
    assert code == 0
    assert rep["schema_version"] == "1"
    assert rep["command"] == "classify"
    assert rep["verdict"] == "good"
    assert rep["degenerate_facets"] == []
    shell = rep["facets"][0]
    assert shell["class"] == "riemannian"
    assert shell["orientation"] == "top"
    assert shell["center"] == [0.0, 0.0, 0.0]
    assert shell["radius"] == pytest.approx(1.0)
    planes = rep["facets"][1:]
    assert all(f["class"] == "riemannian" for f in planes)  # timelike normals
    assert all(f["orientation"] == "side" and f["center"] is None for f in planes)


def test_classify_cone_slab_exits_3(capsys):
    code, rep, _ = run_json(capsys, "classify", CONE_SLAB)
    assert code == 3
    assert rep["verdict"] == "not-good"
    assert rep["degenerate_facets"] == [0]
    assert rep["facets"][0]["class"] == "degenerate"


def test_classify_csv_format(capsys):
    code, out, _ = run(capsys, "classify", CYLINDER, "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "key,value"
    keys = [ln.split(",", 1)[0] for ln in lines[1:]]
    assert "verdict" in keys and "facets[0].class" in keys


# --- volume -------------------------------------------------------------------


def test_volume_cylinder_report(capsys, tmp_path):
    csv_path = tmp_path / "diag.csv"
    code, rep, _ = run_json(capsys, "volume", CYLINDER, "--csv", str(csv_path))
    assert code == 0
    v = complex(rep["value"]["re"], rep["value"]["im"])
    exact = -math.pi * math.acosh(2.0) * 1j
    assert abs(v - exact) <= 1e-6 * abs(exact)
    assert rep["abs_err"] < 1e-8
    assert rep["integrand_evals"] > 0
    assert rep["runtime_ms"] > 0
    assert rep["config"]["tolerance"] == pytest.approx(1e-8)
    plans = rep["breakpoints"]
    assert plans[0]["sheet"] == "upper"
    assert [p["kind"] for p in plans[0]["points"]] == ["inverse_sqrt", "none"]
    rows = csv_path.read_text().strip().splitlines()
    assert rows[0] == "sheet,t,integrand_re,integrand_im"
    assert len(rows) == rep["integrand_evals"] + 1
    sheet, t, bre, bim = rows[1].split(",")
    assert sheet == "upper" and 1.0 <= float(t) <= 2.0
    float(bre), float(bim)  # parse cleanly


def test_volume_env_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("ADSVOL_TOL", "1e-3")
    _, rep, _ = run_json(capsys, "volume", CYLINDER)
    assert rep["config"]["tolerance"] == pytest.approx(1e-3)
    _, rep, _ = run_json(capsys, "volume", CYLINDER, "--tol", "1e-5")
    assert rep["config"]["tolerance"] == pytest.approx(1e-5)


def test_volume_bad_inputs_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "volume", str(tmp_path / "missing.json"))
    assert code == 2 and "cannot read" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "volume", str(bad))
    assert code == 2 and "not valid JSON" in err
    code, _, err = run(capsys, "volume", CYLINDER, "--tol", "-1")
    assert code == 2


def test_volume_cone_slab_exits_3(capsys):
    code, _, err = run(capsys, "volume", CONE_SLAB)
    assert code == 3
    assert "light-cone" in err


def test_volume_without_box_exits_4(capsys, tmp_path):
    obj = json.loads(pathlib.Path(CYLINDER).read_text())
    del obj["bound_box"]
    p = tmp_path / "boxless.json"
    p.write_text(json.dumps(obj))
    code, _, err = run(capsys, "volume", str(p))
    assert code == 4


# --- boundary-volume -------------------------------------------------------------


def test_boundary_volume_square(capsys):
    code, rep, _ = run_json(capsys, "boundary-volume", SQUARE)
    assert code == 0
    assert rep["method"] == "polygon"
    assert rep["methods"]["polygon"]["value"] == pytest.approx(0.0, abs=1e-12)


def test_boundary_volume_both_methods(capsys):
    code, rep, _ = run_json(capsys, "boundary-volume", BULGE, "--method", "both")
    assert code == 0
    poly = rep["methods"]["polygon"]["value"]
    lift = rep["methods"]["lift"]["value"]
    assert poly == pytest.approx(math.log(3.0), abs=1e-9)
    assert rep["discrepancy"] == pytest.approx(abs(poly - lift))
    assert rep["within_tolerance"] is True


def test_boundary_volume_null_tangent_exits_5(capsys, tmp_path):
    p = tmp_path / "null.json"
    p.write_text(json.dumps({"vertices": [[0, 0], [1, 1], [0, 2]], "sides": [None, None, None]}))
    code, _, err = run(capsys, "boundary-volume", str(p))
    assert code == 5
    assert "light-like" in err


# --- invariance ------------------------------------------------------------------


def test_invariance_random_words(capsys):
    code, rep, _ = run_json(capsys, "invariance", CYLINDER, "--random", "3", "--seed", "1")
    assert code == 0
    assert rep["checked"] + rep["skipped"] == 3
    assert rep["all_pass"] is True
    for row in rep["rows"]:
        if "skipped" in row:
            continue
        assert row["pass"] is True
        assert row["deviation"] <= row["tolerance"]


def test_invariance_word_file(capsys, tmp_path):
    wf = tmp_path / "word.json"
    wf.write_text(json.dumps([{"type": "translation", "w": [0.0, 0.4, 0.0]}]))
    code, rep, _ = run_json(capsys, "invariance", CYLINDER, "--word", str(wf))
    assert code == 0
    assert rep["checked"] == 1 and rep["rows"][0]["pass"] is True


def test_invariance_requires_exactly_one_mode(capsys, tmp_path):
    code, _, err = run(capsys, "invariance", CYLINDER)
    assert code == 2
    wf = tmp_path / "word.json"
    wf.write_text(json.dumps([{"type": "inversion_j"}]))
    code, _, err = run(capsys, "invariance", CYLINDER, "--word", str(wf), "--random", "2")
    assert code == 2
    code, _, err = run(capsys, "invariance", CYLINDER, "--random", "0")
    assert code == 2


def test_invariance_report_is_byte_identical(capsys):
    code1, out1, _ = run(capsys, "invariance", CYLINDER, "--random", "2", "--seed", "3")
    code2, out2, _ = run(capsys, "invariance", CYLINDER, "--random", "2", "--seed", "3")
    assert code1 == code2 == 0
    assert out1 == out2  # no runtime field; fully deterministic bytes


# --- oracle ----------------------------------------------------------------------


def test_oracle_compare_agrees(capsys):
    code, rep, _ = run_json(
        capsys,
        "oracle", CYLINDER, "--budget", "16384", "--eps-steps", "5",
        "--seed", "2", "--compare",
    )
    assert code == 0
    assert rep["converged"] is True
    assert rep["agree"] is True
    assert len(rep["eps"]) == 5 and len(rep["estimates"]) == 5
    est = complex(rep["value"]["re"], rep["value"]["im"])
    eng = complex(rep["engine_value"]["re"], rep["engine_value"]["im"])
    assert rep["difference"] == pytest.approx(abs(est - eng))


def test_oracle_env_seed(capsys, monkeypatch):
    _, rep1, _ = run_json(capsys, "oracle", CYLINDER, "--budget", "4096")
    monkeypatch.setenv("ADSVOL_SEED", "9")
    _, rep2, _ = run_json(capsys, "oracle", CYLINDER, "--budget", "4096")
    assert rep1["config"]["seed"] == 0 and rep2["config"]["seed"] == 9
    assert rep1["value"] != rep2["value"]


def test_oracle_bad_schedule_exits_2(capsys):
    code, _, err = run(capsys, "oracle", CYLINDER, "--eps0", "-0.5")
    assert code == 2
    code, _, err = run(capsys, "oracle", CYLINDER, "--eps-steps", "1")
    assert code == 2


def test_oracle_forced_degenerate_exits_6(capsys):
    code, rep, _ = run_json(
        capsys,
        "oracle", CONE_SLAB, "--allow-degenerate", "--budget", "8192",
        "--eps-steps", "6", "--seed", "1",
    )
    assert code == 6
    assert rep["converged"] is False


def test_oracle_degenerate_without_flag_exits_3(capsys):
    code, _, err = run(capsys, "oracle", CONE_SLAB)
    assert code == 3
