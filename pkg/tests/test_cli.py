"""End-to-end tests for the command-line interface."""

from __future__ import annotations

import json

import numpy as np
import pytest

from coevoscape import cli
from coevoscape.evolution import run_trajectory
from coevoscape.experiment import ExperimentConfig, trajectory_seed
from coevoscape.landscape import snapshot_profiles
from coevoscape.substrate import kind_from_name

SMOOTH_SMALL = {
    "substrate": {"function": "smooth"},
    "evolution": {"generations": 10},
    "experiment": {"runs": 2, "master_seed": 11},
}


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0], [line.split(",") for line in lines[1:]]


def test_simulate_writes_trajectory(tmp_path):
    cfg = write_config(tmp_path, SMOOTH_SMALL)
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    header, rows = read_rows(out / "trajectory.csv")
    assert header == "generation,best_p1,fitness_p1,best_p2,fitness_p2"
    assert len(rows) == 11
    assert [r[0] for r in rows] == [str(k) for k in range(11)]
    assert not (out / "snapshots").exists()


def test_simulate_snapshot_selection(tmp_path):
    cfg = write_config(tmp_path, SMOOTH_SMALL)
    out = tmp_path / "out"
    rc = cli.main(["simulate", "--config", str(cfg), "--out", str(out),
                   "--generations", "0"])
    assert rc == 0
    snaps = sorted(p.name for p in (out / "snapshots").iterdir())
    assert snaps == ["landscape_k0.csv"]


def test_simulate_config_snapshots_flag(tmp_path):
    data = dict(SMOOTH_SMALL)
    data["evolution"] = {"generations": 2}
    data["experiment"] = {"runs": 1, "master_seed": 11, "snapshots": True}
    cfg = write_config(tmp_path, data)
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    snaps = sorted(p.name for p in (out / "snapshots").iterdir())
    assert snaps == ["landscape_k0.csv", "landscape_k1.csv", "landscape_k2.csv"]


def test_simulate_missing_config(tmp_path, capsys):
    rc = cli.main(["simulate", "--config", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path)])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_landscape_default_generations(tmp_path):
    cfg = write_config(tmp_path, SMOOTH_SMALL)
    out = tmp_path / "land"
    assert cli.main(["landscape", "--config", str(cfg), "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["landscape_k0.csv", "landscape_k3.csv", "landscape_k6.csv"]
    header, rows = read_rows(out / "landscape_k3.csv")
    assert header == "x,f_obj,f_sub_p1,f_sub_p2"
    assert len(rows) == 301
    for row in rows:
        assert 0.0 <= float(row[2]) <= 1.0
        assert 0.0 <= float(row[3]) <= 1.0


def test_landscape_generation_bounds(tmp_path, capsys):
    data = dict(SMOOTH_SMALL)
    data["evolution"] = {"generations": 4}
    cfg = write_config(tmp_path, data)
    rc = cli.main(["landscape", "--config", str(cfg), "--out", str(tmp_path / "x")])
    assert rc == 1
    assert "out of range" in capsys.readouterr().err
    rc = cli.main(["landscape", "--config", str(cfg), "--out", str(tmp_path / "x"),
                   "--generations", "zero"])
    assert rc == 1


def test_landscape_matches_library_values(tmp_path):
    data = {
        "substrate": {"function": "sinusoid"},
        "evolution": {"generations": 3},
        "experiment": {"runs": 1, "master_seed": 42},
    }
    cfg_path = write_config(tmp_path, data)
    out = tmp_path / "land"
    rc = cli.main(["landscape", "--config", str(cfg_path), "--out", str(out),
                   "--generations", "3", "--seed", "7"])
    assert rc == 0

    config = ExperimentConfig.from_dict(data)
    states = run_trajectory(config, trajectory_seed(7, 0))
    grid = config.grid()
    obj, sub1, sub2 = snapshot_profiles(states[3], grid, kind_from_name("sinusoid"))
    _, rows = read_rows(out / "landscape_k3.csv")
    parsed = np.array([[float(v) for v in row] for row in rows])
    # repr round-trips floats, so the file reproduces the values bit-exactly
    assert np.array_equal(parsed[:, 0], grid)
    assert np.array_equal(parsed[:, 1], obj.values)
    assert np.array_equal(parsed[:, 2], sub1.values)
    assert np.array_equal(parsed[:, 3], sub2.values)


def test_measures_row_shape(tmp_path):
    cfg = write_config(tmp_path, SMOOTH_SMALL)
    out = tmp_path / "meas"
    assert cli.main(["measures", "--config", str(cfg), "--out", str(out)]) == 0
    header, rows = read_rows(out / "measures.csv")
    assert header == "generation,population,measure,mean,ci_lo,ci_hi"
    assert len(rows) == 66
    assert rows[0][:3] == ["0", "P1", "dist"]
    assert rows[-1][:3] == ["10", "P2", "bhatt"]


def test_measures_single_run_degenerate_ci(tmp_path):
    data = dict(SMOOTH_SMALL)
    data["evolution"] = {"generations": 2}
    data["experiment"] = {"runs": 1, "master_seed": 11}
    cfg = write_config(tmp_path, data)
    out = tmp_path / "meas"
    assert cli.main(["measures", "--config", str(cfg), "--out", str(out)]) == 0
    _, rows = read_rows(out / "measures.csv")
    for row in rows:
        assert row[3] == row[4] == row[5]


def test_measures_byte_identical_reruns(tmp_path):
    cfg = write_config(tmp_path, SMOOTH_SMALL)
    a = tmp_path / "a"
    b = tmp_path / "b"
    c = tmp_path / "c"
    assert cli.main(["measures", "--config", str(cfg), "--out", str(a)]) == 0
    assert cli.main(["measures", "--config", str(cfg), "--out", str(b)]) == 0
    assert cli.main(["measures", "--config", str(cfg), "--out", str(c),
                     "--workers", "2"]) == 0
    blob = (a / "measures.csv").read_bytes()
    assert blob == (b / "measures.csv").read_bytes()
    assert blob == (c / "measures.csv").read_bytes()


def test_measures_seed_flag_overrides_config(tmp_path):
    cfg = write_config(tmp_path, SMOOTH_SMALL)
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert cli.main(["measures", "--config", str(cfg), "--out", str(a)]) == 0
    assert cli.main(["measures", "--config", str(cfg), "--out", str(b),
                     "--seed", "12"]) == 0
    assert (a / "measures.csv").read_bytes() != (b / "measures.csv").read_bytes()


def test_json_mirror(tmp_path):
    data = dict(SMOOTH_SMALL)
    data["evolution"] = {"generations": 1}
    cfg = write_config(tmp_path, data)
    out = tmp_path / "out"
    rc = cli.main(["simulate", "--config", str(cfg), "--out", str(out),
                   "--format", "json", "--generations", "1"])
    assert rc == 0
    records = json.loads((out / "trajectory.json").read_text())
    assert len(records) == 2
    assert list(records[0]) == ["generation", "best_p1", "fitness_p1",
                                "best_p2", "fitness_p2"]
    _, rows = read_rows(out / "trajectory.csv")
    assert records[1]["best_p1"] == float(rows[1][1])
    assert (out / "snapshots" / "landscape_k1.json").exists()


def test_invalid_config_key_reports_error(tmp_path, capsys):
    cfg = write_config(tmp_path, {"substrate": {"flavor": "smooth"}})
    rc = cli.main(["measures", "--config", str(cfg), "--out", str(tmp_path / "x")])
    assert rc == 1
    assert "unknown key" in capsys.readouterr().err


def test_measures_per_run_snapshots(tmp_path):
    data = {
        "substrate": {"function": "ridge"},
        "evolution": {"generations": 1},
        "experiment": {"runs": 2, "master_seed": 3, "snapshots": True},
    }
    cfg = write_config(tmp_path, data)
    out = tmp_path / "meas"
    assert cli.main(["measures", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "measures.csv").exists()
    for r in (0, 1):
        run_dir = out / "snapshots" / f"run_{r:03d}"
        names = sorted(p.name for p in run_dir.iterdir())
        assert names == ["landscape_k0.csv", "landscape_k1.csv"]
