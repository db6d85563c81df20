import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from lieminimal.cli import AnalysisConfig, main
from lieminimal.errors import ConfigError
from lieminimal.export import read_csv, read_obj, read_report, write_csv

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def copy_config(tmp_path, name):
    # outputs named in a config resolve next to it, so run from a copy
    target = tmp_path / name
    target.write_text((CONFIGS / name).read_text())
    return str(target)


def write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("catenoid", "enneper", "unduloid", "spline-profile"):
        assert name in out


def test_analyze_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cfg = copy_config(tmp_path, "unduloid.toml")
    for target in (a, b):
        assert main(["analyze", cfg, "--grid", "16x16", "--out", str(target)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seeded_spline_report_depends_on_seed(tmp_path):
    cfg = write(tmp_path, '[surface]\nname = "spline-profile"\n[analyses]\nrequested = ["el"]\n')
    outs = []
    for seed in ("1", "1", "2"):
        target = tmp_path / f"s{len(outs)}.json"
        assert main(["analyze", cfg, "--grid", "12x12", "--seed", seed, "--out", str(target)]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1] != outs[2]
    assert json.loads(outs[2])["seed"] == 2


def test_report_round_trip(tmp_path):
    target = tmp_path / "r.json"
    assert main(["fit", str(CONFIGS / "catenoid.toml"), "--grid", "12x12", "--out", str(target)]) == 0
    rep = read_report(target)
    assert rep["schema_version"] == 1
    np.testing.assert_allclose(rep["weingarten"]["linear"]["coefficients"], [0, 1, 0], atol=1e-12)
    assert rep["analyses"] == ["weingarten"]


def test_sphere_exits_with_umbilic(capsys):
    assert main(["analyze", str(CONFIGS / "sphere.toml"), "--grid", "12x12"]) == 2
    assert "UmbilicPoint" in capsys.readouterr().err


def test_enneper_is_not_lie_minimal(tmp_path):
    target = tmp_path / "e.json"
    assert main(["analyze", str(CONFIGS / "enneper.toml"), "--grid", "16x16", "--out", str(target)]) == 0
    rep = read_report(target)
    verdict = next(v for v in rep["verdicts"] if v["claim"].startswith("Lie minimal"))
    assert not verdict["holds"]
    assert rep["el"]["max_normalized"] > 1e-3


def test_unknown_fixture_and_bad_config(tmp_path, capsys):
    assert main(["analyze", write(tmp_path, '[surface]\nname = "klein-bottle"\n')]) == 2
    assert main(["analyze", write(tmp_path, "[surface\n")]) == 2
    assert main(["analyze", write(tmp_path, '[surface]\nname = "catenoid"\n[grid]\nnx = 2\n')]) == 2
    assert main(["analyze", str(tmp_path / "missing.toml")]) == 3


def test_config_validation():
    with pytest.raises(ConfigError):
        AnalysisConfig.from_dict({"surface": {}}).validate()
    with pytest.raises(ConfigError):
        AnalysisConfig.from_dict({"surface": {"name": "catenoid"},
                                  "tolerances": {"fit": -1.0}}).validate()


def test_csv_and_mesh_outputs(tmp_path, capsys):
    cfg = write(tmp_path, '[surface]\nname = "cylinder"\n[grid]\nnx = 8\nny = 9\n'
                          '[analyses]\nrequested = ["curvature", "el"]\n'
                          '[output]\ncsv_dir = "grids"\nreport = "rep.json"\nmesh = "cyl.obj"\n')
    assert main(["analyze", cfg]) == 0
    cols = read_csv(tmp_path / "grids" / "curvature.csv")
    assert len(cols["u"]) == 72
    header = (tmp_path / "grids" / "curvature.csv").read_text().splitlines()[0]
    assert header.startswith("u,v")
    assert main(["mesh", cfg]) == 0
    verts, normals, faces = read_obj(tmp_path / "cyl.obj")
    assert verts.shape == (72, 3) and normals.shape == (72, 3)
    assert len(faces) == 2 * 7 * 8
    np.testing.assert_allclose(np.hypot(verts[:, 0], verts[:, 1]), 1.0, atol=1e-9)


def test_csv_precision(tmp_path):
    path = tmp_path / "x.csv"
    write_csv(path, {"a": [np.pi, 1e-20], "b": [2.0, -3.5]})
    lines = path.read_text().splitlines()
    assert lines == ["a,b", "3.141592654,2", "1e-20,-3.5"]


def test_parallel_command(tmp_path):
    target = tmp_path / "p.json"
    assert main(["parallel", copy_config(tmp_path, "unduloid.toml"), "--grid", "12x12",
                 "--t", "-0.1", "0.1", "--out", str(target)]) == 0
    rows = read_report(target)["bonnet"]["rows"]
    assert [r["t"] for r in rows] == [-0.1, 0.1] and all(r["ok"] for r in rows)


def test_curved_space_mesh_is_projected(tmp_path):
    target = tmp_path / "band.obj"
    assert main(["mesh", str(CONFIGS / "band-sphere.toml"), "--grid", "8x8", "--out", str(target)]) == 0
    text = target.read_text()
    assert "stereographic" in text
    verts, _, _ = read_obj(target)
    assert np.all(np.isfinite(verts))


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "lieminimal.cli", "--version"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip().startswith("lieminimal")


def test_profile_csv_input(tmp_path):
    v = np.linspace(-1.0, 1.0, 81)
    write_csv(tmp_path / "prof.csv", {"v": v, "r": np.cosh(v), "h": v})
    cfg = write(tmp_path, '[surface]\nprofile = "prof.csv"\ndomain = [[0.0, 3.0], [-0.9, 0.9]]\n'
                          '[analyses]\nrequested = ["curvature", "el"]\n[tolerances]\nresidual = 1e-6\n')
    target = tmp_path / "p.json"
    assert main(["analyze", cfg, "--grid", "12x12", "--out", str(target)]) == 0
    rep = read_report(target)
    assert rep["fixture"]["rotational"]
    assert rep["el"]["max_normalized"] <= 1e-6
