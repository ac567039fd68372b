import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
import yaml

from fembem.cli import main
from fembem.config import load_config

ROOT = Path(__file__).resolve().parents[1]

STAR = {
    "geometry": {"curve": {"name": "circle", "params": {"radius": 3.5}},
                 "rectangle": [-6, 6, -8, 8], "level": 0, "degree": 2},
    "medium": {"preset": "star", "params": {"contrast": 16}},
    "wave": {"k": "pi/4", "direction": [1, 0]},
    "solver": {"method": "gmres", "tol": 1e-8, "N": 20},
    "outputs": {"far_field_angles": 64},
}

DISK = {
    "geometry": {"curve": {"name": "circle", "params": {"radius": 1.25}},
                 "rectangle": [-3, 3, -3, 3], "divisions": [12, 12], "level": 0,
                 "degree": 2},
    "medium": {"preset": "smooth_disk", "params": {"radius": 1.0, "n0": 2.0, "inner": 0.25}},
    "wave": {"k": "pi"},
    "solver": {"N": 40},
    "outputs": {"far_field_angles": 200},
}


def write_config(tmp_path, data, name="run.yaml", **updates):
    cfg = json.loads(json.dumps(data))
    for section, values in updates.items():
        cfg.setdefault(section, {}).update(values)
    cfg.setdefault("outputs", {}).setdefault("directory", str(tmp_path / "out"))
    path = tmp_path / name
    path.write_text(yaml.safe_dump(cfg))
    return path


def read_farfield(path):
    lines = path.read_text().splitlines()
    assert lines[0] == "theta,re,im,abs"
    return np.array([[float(v) for v in line.split(",")] for line in lines[1:]])


# --------------------------------------------------------------------------- configuration

def test_shipped_configs_validate(capsys):
    for name in ("experiment1.yaml", "experiment2.yaml", "penetrable_disk.yaml"):
        assert main(["validate", "--config", str(ROOT / "configs" / name)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["valid"] and report["L"] > 0


def test_unknown_key_is_a_configuration_error(tmp_path, capsys):
    path = write_config(tmp_path, STAR, solver={"precondition": True})
    assert main(["validate", "--config", str(path)]) == 2
    assert "precondition" in capsys.readouterr().err


@pytest.mark.parametrize("section,values", [
    ("geometry", {"degree": 7}),
    ("geometry", {"curve": {"name": "circle", "params": {"radius": 7.0}}}),
    ("geometry", {"curve": {"name": "circle", "params": {"radius": 1.0}}}),
    ("geometry", {"curve": {"name": "spiral"}}),
    ("geometry", {"curve": {"name": "circle", "params": {"radius": 3.0, "colour": 1}}}),
    ("wave", {"k": "-1"}),
    ("wave", {"direction": [1, 1]}),
    ("solver", {"method": "jacobi"}),
    ("solver", {"tol": 0}),
    ("medium", {"preset": "unobtainium"}),
])
def test_invalid_configurations_exit_2(tmp_path, section, values):
    path = write_config(tmp_path, STAR, **{section: values})
    assert main(["validate", "--config", str(path)]) == 2


def test_missing_config_file_exits_2(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "absent.yaml")]) == 2


def test_wavenumber_expressions(tmp_path):
    path = write_config(tmp_path, STAR, wave={"k": "4*pi"})
    assert load_config(path).wave.k == pytest.approx(4 * np.pi)


# --------------------------------------------------------------------------- solve

def test_solve_writes_artifacts(tmp_path, capsys):
    path = write_config(tmp_path, STAR,
                        outputs={"artifacts": ["farfield", "solver_log", "summary", "overlap"],
                                 "overlap_samples": 50})
    assert main(["solve", "--config", str(path)]) == 0
    out = tmp_path / "out"
    F = read_farfield(out / "farfield.csv")
    assert F.shape == (64, 4)
    np.testing.assert_allclose(F[:, 3], np.hypot(F[:, 1], F[:, 2]))
    summary = json.loads((out / "summary.json").read_text())
    assert summary["residual"] <= 1e-8 and summary["method"] == "gmres"
    log = (out / "solver_log.csv").read_text().splitlines()
    assert log[0] == "iter,residual" and len(log) == summary["iterations"] + 1
    assert summary["overlap"]["samples"] == 50
    assert "iterations=" in capsys.readouterr().out


def test_solve_is_reproducible_byte_for_byte(tmp_path):
    path = write_config(tmp_path, STAR)
    assert main(["solve", "--config", str(path), "--out", str(tmp_path / "a")]) == 0
    assert main(["solve", "--config", str(path), "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "farfield.csv").read_bytes() == (tmp_path / "b" / "farfield.csv").read_bytes()


def test_solve_refuses_to_overwrite(tmp_path, capsys):
    path = write_config(tmp_path, STAR)
    assert main(["solve", "--config", str(path)]) == 0
    before = (tmp_path / "out" / "farfield.csv").read_bytes()
    assert main(["solve", "--config", str(path)]) == 2
    assert "--overwrite" in capsys.readouterr().err
    assert (tmp_path / "out" / "farfield.csv").read_bytes() == before
    assert main(["solve", "--config", str(path), "--overwrite", "--solver", "direct"]) == 0


def test_zero_amplitude_gives_exact_zeros(tmp_path):
    path = write_config(tmp_path, STAR, wave={"amplitude": 0.0})
    assert main(["solve", "--config", str(path)]) == 0
    F = read_farfield(tmp_path / "out" / "farfield.csv")
    assert np.all(F[:, 1:] == 0.0)
    text = (tmp_path / "out" / "farfield.csv").read_text()
    assert "-0.0" not in text
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["iterations"] == 0


def test_direct_and_gmres_far_fields_agree(tmp_path):
    path = write_config(tmp_path, STAR)
    assert main(["solve", "--config", str(path), "--out", str(tmp_path / "g")]) == 0
    assert main(["solve", "--config", str(path), "--solver", "direct",
                 "--out", str(tmp_path / "d")]) == 0
    g = read_farfield(tmp_path / "g" / "farfield.csv")
    d = read_farfield(tmp_path / "d" / "farfield.csv")
    assert np.abs(g[:, 1:3] - d[:, 1:3]).max() <= 1e-7 * np.abs(d[:, 3]).max()


def test_raster_artifact(tmp_path):
    path = write_config(tmp_path, STAR, outputs={"artifacts": ["raster"], "raster": [13, 17]})
    assert main(["solve", "--config", str(path)]) == 0
    data = np.load(tmp_path / "out" / "raster.npz")
    assert data["u"].shape == (17, 13)
    assert np.all(np.isfinite(data["u"]))


def test_iteration_count_stable_under_refinement(tmp_path):
    path = write_config(tmp_path, STAR, outputs={"artifacts": ["summary"]})
    counts = []
    for level in (0, 1):
        out = tmp_path / f"level{level}"
        assert main(["solve", "--config", str(path), "--level", str(level), "--out", str(out)]) == 0
        counts.append(json.loads((out / "summary.json").read_text())["iterations"])
    assert abs(counts[0] - counts[1]) <= 2


# --------------------------------------------------------------------------- oracle

def test_oracle_sound_soft(tmp_path):
    out = tmp_path / "oracle"
    assert main(["oracle", "--kind", "sound-soft", "--k", "pi", "--radius", "1",
                 "--out", str(out)]) == 0
    lines = (out / "farfield.csv").read_text().splitlines()
    assert len(lines) == 1001
    F = read_farfield(out / "farfield.csv")
    assert F[0, 3] > 0


def test_oracle_unit_index_is_zero(tmp_path):
    out = tmp_path / "oracle"
    assert main(["oracle", "--kind", "penetrable", "--k", "2", "--n0", "1",
                 "--angles", "32", "--out", str(out)]) == 0
    F = read_farfield(out / "farfield.csv")
    assert np.abs(F[:, 1:]).max() < 1e-15


@pytest.mark.parametrize("argv", [
    ["--kind", "sound-soft", "--k", "1", "--n0", "2"],
    ["--kind", "penetrable", "--k", "1"],
    ["--kind", "penetrable", "--k", "1", "--n0", "-2"],
    ["--kind", "sound-soft", "--k", "zero"],
    ["--kind", "sound-soft", "--k", "1", "--radius", "0"],
])
def test_oracle_bad_parameters_exit_2(tmp_path, argv):
    assert main(["oracle", *argv, "--out", str(tmp_path / "o")]) == 2


# --------------------------------------------------------------------------- convergence

def test_convergence_single_point(tmp_path, capsys):
    path = write_config(tmp_path, DISK)
    out = tmp_path / "conv"
    assert main(["convergence", "--config", str(path), "--levels", "0", "--N", "40",
                 "--out", str(out)]) == 0
    rows = (out / "convergence.csv").read_text().splitlines()
    assert len(rows) == 2 and "order" not in rows[0]
    assert "truth: series" in capsys.readouterr().out


def test_convergence_errors_decrease(tmp_path):
    path = write_config(tmp_path, DISK)
    out = tmp_path / "conv"
    assert main(["convergence", "--config", str(path), "--levels", "0,1,2", "--N", "40",
                 "--out", str(out)]) == 0
    rows = (out / "convergence.csv").read_text().splitlines()
    head = rows[0].split(",")
    errors = [float(r.split(",")[head.index("error")]) for r in rows[1:]]
    assert len(errors) == 3 and errors[0] > errors[1] > errors[2]
    orders = [float(r.split(",")[head.index("order")]) for r in rows[2:]]
    assert min(orders) > 2.5
    assert (out / "convergence.txt").exists()


def test_bad_level_list_is_rejected(tmp_path):
    path = write_config(tmp_path, DISK)
    with pytest.raises(SystemExit) as info:
        main(["convergence", "--config", str(path), "--levels", "a,b", "--N", "40"])
    assert info.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fembem", "--version"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
