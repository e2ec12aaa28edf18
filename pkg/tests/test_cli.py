import json
import math

import numpy as np
import pytest

from camoscat import cli
from camoscat.errors import NonConvergence
from camoscat.model import Ellipse, IncidentWave, LayerProfile, MaterialSet, UnitCell, scene_to_dict, validate_scene


def _scene_doc(materials=None, xi=0.05):
    m = materials or MaterialSet(1, 1, 1.5, 2.5, 1, 2, 2, 4, 1, 4)
    scene = validate_scene(m, LayerProfile(0.5, xi, cos=(0.2,)), UnitCell(1, 1, Ellipse((0.5, 0.5), (0.3, 0.3))),
                           IncidentWave.from_angle(2 * math.pi, math.radians(20)), Ellipse((0, -3), (0.5, 0.5)))
    return scene_to_dict(scene)


@pytest.fixture
def scene_file(tmp_path):
    p = tmp_path / "scene.json"
    p.write_text(json.dumps(_scene_doc()))
    return p


def _run(*argv):
    return cli.main([str(a) for a in argv])


def _report(out):
    return json.loads((out / "report.json").read_text())


def test_homogeneous_cell_gives_isotropic_tensor(tmp_path):
    m = MaterialSet(1, 1, 1.5, 2.5, 2, 3, 2, 3, 1, 4)
    p = tmp_path / "s.json"
    p.write_text(json.dumps(_scene_doc(m)))
    out = tmp_path / "o"
    assert _run("homogenize", "--scene", p, "--out", out, "--n-grid", "32x32") == 0
    eff = _report(out)["result"]["effective"]
    np.testing.assert_allclose(np.array(eff["A"]), np.eye(2) / 2, atol=1e-12)
    assert eff["eps_minus"] == pytest.approx(3.0, abs=1e-12)


def test_layer_coeffs_and_background_write_artifacts(scene_file, tmp_path):
    out = tmp_path / "o"
    assert _run("layer-coeffs", "--scene", scene_file, "--out", out, "--n-grid", "32x32") == 0
    assert set(json.loads((out / "coefficients.json").read_text())) >= {"psi", "phi1", "phi2", "phi3"}
    assert _run("background", "--scene", scene_file, "--out", out, "--n-grid", "32x32",
                "--grid=-1:1:5,1:1.5:3") == 0
    lines = (out / "background.csv").read_text().splitlines()
    assert lines[0] == cli.FIELD_COLUMNS and len(lines) == 16
    # the layer terms exchange energy with the interface at first order in xi
    assert _report(out)["result"]["energy_defect"] < 2 * 0.05


def test_green_marks_source_as_nan(scene_file, tmp_path):
    out = tmp_path / "o"
    assert _run("green", "--scene", scene_file, "--out", out, "--n-grid", "32x32", "--source", 0, -1,
                "--grid=-0.5:0.5:3,-1:1:3", "--tol", 1e-8) == 0
    data = np.loadtxt(out / "green.csv", delimiter=",", skiprows=1)
    src = (data[:, 0] == 0) & (data[:, 1] == -1)
    assert np.all(np.isnan(data[src, 2])) and np.all(np.isfinite(data[~src, 2]))


def test_zero_contrast_scatter_is_background(tmp_path):
    m = MaterialSet(1, 1, 1, 1, 1, 1, 1, 1, 1, 1)
    p = tmp_path / "s.json"
    p.write_text(json.dumps(_scene_doc(m)))
    out = tmp_path / "o"
    assert _run("scatter", "--scene", p, "--out", out, "--n-grid", "16x16", "--nodes", 32,
                "--grid=-1:1:5,1:1.5:3") == 0
    assert _report(out)["result"]["max_scattered_over_background"] < 1e-8


def test_scatter_csv_is_byte_identical(scene_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert _run("scatter", "--scene", scene_file, "--out", out, "--n-grid", "32x32", "--nodes", 32,
                    "--grid=-1:1:5,1:1.5:3") == 0
    assert (a / "field.csv").read_bytes() == (b / "field.csv").read_bytes()


def test_report_records_configuration_and_versions(scene_file, tmp_path):
    out = tmp_path / "o"
    _run("homogenize", "--scene", scene_file, "--out", out, "--n-grid", "32x32")
    rep = _report(out)
    assert rep["command"] == "homogenize"
    assert rep["config"]["n_grid"] == [32, 32]
    assert "numpy" in rep["versions"] and "total_s" in rep["timings"]


def test_coarse_layer_exits_with_validation_status(tmp_path):
    doc = _scene_doc()
    doc["layer"]["xi"] = 0.5
    p = tmp_path / "s.json"
    p.write_text(json.dumps(doc))
    assert _run("homogenize", "--scene", p, "--out", tmp_path / "o") == cli.EXIT_VALIDATION == 2


def test_numerical_failure_exit_status(scene_file, tmp_path, monkeypatch):
    def boom(args, out):
        raise NonConvergence("did not converge")
    monkeypatch.setitem(cli.COMMANDS, "homogenize", boom)
    assert _run("homogenize", "--scene", scene_file, "--out", tmp_path / "o") == cli.EXIT_NUMERICAL == 3


@pytest.mark.parametrize("content", [None, "{not json"])
def test_io_failures_exit_status(tmp_path, content):
    p = tmp_path / "s.json"
    if content is not None:
        p.write_text(content)
    assert _run("homogenize", "--scene", p, "--out", tmp_path / "o") == cli.EXIT_IO == 4


@pytest.mark.parametrize("bad", ["7", "2000", "abc"])
def test_node_count_is_checked(scene_file, tmp_path, bad):
    with pytest.raises(SystemExit):
        _run("scatter", "--scene", scene_file, "--out", tmp_path, "--nodes", bad)


def test_help_lists_csv_columns(capsys):
    with pytest.raises(SystemExit):
        cli.main(["scatter", "--help"])
    assert "re_u" in capsys.readouterr().out
