import json

import numpy as np
import pytest

from meshdist import BinaryMask, surface_nets
from meshdist.cli import run
from meshdist.io import write_mesh, write_nrrd
from meshdist.oracle import ShapeSpec, rasterize


@pytest.fixture
def masks(tmp_path):
    extent = ([-5.0, -5.0], [5.0, 5.0])
    a = rasterize(ShapeSpec.circle(3.0), 0.5, extent)
    b = rasterize(ShapeSpec.circle(3.6, (0.2, -0.1)), 0.5, extent)
    paths = {}
    for name, mask in (("a", a), ("b", b), ("empty", BinaryMask(np.zeros(a.shape), a.spacing, a.origin))):
        paths[name] = str(tmp_path / f"{name}.nrrd")
        write_nrrd(paths[name], mask)
    return paths


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compute_identity(capsys, masks):
    code, out, _ = _run(capsys, "compute", masks["a"], masks["a"])
    rep = json.loads(out)
    assert code == 0
    assert rep["metrics"]["hd"] == 0.0 and rep["metrics"]["nsd"] == 1.0
    assert rep["flags"] == {"ref_empty": False, "pred_empty": False}
    assert rep["units"]["hd"] == "mm" and rep["warnings"] == []


def test_compute_empty_prediction(capsys, masks):
    code, out, err = _run(capsys, "compute", masks["a"], masks["empty"])
    rep = json.loads(out)
    assert code == 0
    assert rep["metrics"]["hd_perc"] == "inf" and rep["metrics"]["nsd"] == 0.0 and rep["metrics"]["dsc"] == 0.0
    assert rep["flags"]["pred_empty"] and not rep["flags"]["ref_empty"]
    assert "warning" in err and rep["warnings"]


def test_compute_options_and_csv(capsys, masks):
    code, out, _ = _run(
        capsys, "compute", masks["a"], masks["b"], "--metrics", "hd,nsd", "--tau", "1.0", "--percentile", "90",
        "--format", "csv",
    )
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "metric,value,unit" and [l.split(",")[0] for l in lines[1:]] == ["hd", "nsd"]


def test_grid_paradigm_and_compare(capsys, masks):
    code, out, _ = _run(capsys, "compute", masks["a"], masks["b"], "--paradigm", "grid")
    assert code == 0 and json.loads(out)["paradigm"] == "grid"
    code, out, _ = _run(capsys, "compare", masks["a"], masks["b"])
    rep = json.loads(out)
    assert code == 0 and set(rep["metrics"]) == {"mesh", "grid", "deviation"}
    m = rep["metrics"]
    assert m["deviation"]["hd"] == pytest.approx(m["grid"]["hd"] - m["mesh"]["hd"])


def test_curve_grid_is_coarser(capsys, masks):
    curves = {}
    for paradigm in ("grid", "mesh"):
        code, out, _ = _run(capsys, "curve", masks["a"], masks["b"], "--paradigm", paradigm)
        lines = out.strip().splitlines()
        assert code == 0 and lines[0] == "tau,nsd" and len(lines) == 502
        curves[paradigm] = {l.split(",")[1] for l in lines[1:]}
    assert len(curves["grid"]) < len(curves["mesh"])


def test_resample_option(capsys, masks):
    code, out, _ = _run(capsys, "compute", masks["a"], masks["b"], "--resample", "1.0,1.0", "--metrics", "dsc")
    assert code == 0 and 0 < json.loads(out)["metrics"]["dsc"] <= 1


def test_mesh_inputs(capsys, tmp_path):
    extent = ([-5.0] * 3, [5.0] * 3)
    for name, r in (("a", 3.0), ("b", 3.5)):
        write_mesh(tmp_path / f"{name}.obj", surface_nets(rasterize(ShapeSpec.sphere(r), 0.5, extent)))
    a, b = str(tmp_path / "a.obj"), str(tmp_path / "b.obj")
    code, out, _ = _run(capsys, "compute", a, b)
    rep = json.loads(out)
    assert code == 0 and set(rep["metrics"]) == {"hd", "hd_perc", "masd", "assd", "nsd"}
    assert rep["metrics"]["masd"] == pytest.approx(0.5, abs=0.1)
    code, _, err = _run(capsys, "compute", a, b, "--metrics", "dsc")
    assert code == 2 and "mask inputs" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["compute", "missing.nrrd", "missing.nrrd"],
        ["compute", "{a}", "{a}", "--percentile", "0"],
        ["compute", "{a}", "{a}", "--metrics", "volume"],
        ["curve", "{a}", "{b}", "--tau-step", "0"],
        ["compute", "{a}", "{a}", "--threads", "0"],
    ],
)
def test_input_errors_exit_2(capsys, masks, argv):
    code, _, err = _run(capsys, *[a.format(**masks) for a in argv])
    assert code == 2 and err.startswith("error:")


def test_geometry_mismatch_exit_2(capsys, masks, tmp_path):
    other = str(tmp_path / "other.nrrd")
    write_nrrd(other, BinaryMask(np.ones((3, 3)), spacing=0.5))
    code, _, err = _run(capsys, "compute", masks["a"], other)
    assert code == 2 and "same grid" in err
