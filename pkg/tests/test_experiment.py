"""Unit tests for configuration, CI aggregation, and batch running."""

from __future__ import annotations

import json

import numpy as np
import pytest
from scipy import stats

from coevoscape.evolution import run_trajectory
from coevoscape.experiment import (
    MEASURES,
    POPULATIONS,
    ConfigError,
    ExperimentConfig,
    MeasureSeries,
    ci95,
    run_batch,
    trajectory_seed,
)
from coevoscape.landscape import measure_generation

# hand-evaluated: t(0.975, df=1) * std({0,1}, ddof=1) / sqrt(2)
CI_HALF_WIDTH_TWO_SAMPLES = 6.353102368216047


def test_ci95_degenerate_cases():
    assert ci95([5.0, 5.0, 5.0, 5.0]) == (5.0, 5.0, 5.0)
    assert ci95([3.25]) == (3.25, 3.25, 3.25)
    with pytest.raises(ValueError):
        ci95([])


def test_ci95_two_samples_hand_value():
    mean, lo, hi = ci95([0.0, 1.0])
    assert mean == 0.5
    assert hi - mean == pytest.approx(CI_HALF_WIDTH_TWO_SAMPLES, abs=1e-12)
    assert mean - lo == pytest.approx(CI_HALF_WIDTH_TWO_SAMPLES, abs=1e-12)


def test_ci95_matches_scipy_interval():
    rng = np.random.default_rng(31)
    samples = rng.normal(size=40)
    mean, lo, hi = ci95(samples)
    t = stats.t.ppf(0.975, 39)
    half = t * samples.std(ddof=1) / np.sqrt(40)
    assert lo == pytest.approx(mean - half) and hi == pytest.approx(mean + half)


def test_config_defaults_match_standard_setup():
    cfg = ExperimentConfig()
    assert (cfg.pop_size, cfg.sample_size, cfg.tournament_size) == (24, 12, 2)
    assert (cfg.mutation_prob, cfg.mutation_sigma) == (0.5, 0.1)
    assert (cfg.runs, cfg.generations) == (100, 10)
    assert cfg.task_p1 == "minimize" and cfg.task_p2 == "maximize"
    assert cfg.interaction_mode().competitive


def test_config_grid_and_interval_defaults():
    smooth = ExperimentConfig()
    g = smooth.grid()
    assert g[0] == -3.0 and g[-1] == 3.0 and g.size == 301
    assert smooth.evo_params().init_interval_p1 == (-3.0, 3.0)

    ridge = ExperimentConfig(function="ridge", ridge_n=8.0)
    g = ridge.grid()
    assert g[0] == -2.0 and g[-1] == 10.0
    assert ridge.evo_params().init_interval_p1 == (0.0, 8.0)
    assert ridge.evo_params().init_interval_p2 == (0.0, 8.0)

    explicit = ExperimentConfig(function="ridge", grid_lo=0.0, grid_hi=8.0,
                                init_interval_p1=(1.0, 2.0))
    assert explicit.grid()[0] == 0.0 and explicit.grid()[-1] == 8.0
    assert explicit.evo_params().init_interval_p1 == (1.0, 2.0)


def test_config_from_dict_sections():
    cfg = ExperimentConfig.from_dict({
        "substrate": {"function": "ridge", "ridge_n": 4.0},
        "evolution": {"pop_size": 10, "sample_size": 5, "generations": 3,
                      "init_interval_p1": [0.0, 4.0]},
        "interaction": {"task_p1": "maximize", "task_p2": "maximize"},
        "landscape": {"grid_points": 11, "bhatt_mode": "verbatim"},
        "experiment": {"runs": 2, "master_seed": 9},
    })
    assert cfg.ridge_n == 4.0
    assert cfg.init_interval_p1 == (0.0, 4.0)
    assert cfg.interaction_mode().cooperative
    assert cfg.bhatt_mode == "verbatim"


def test_config_round_trip():
    cfg = ExperimentConfig(function="sinusoid", runs=7, grid_points=51)
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg


def test_config_rejects_unknown_names():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"substrte": {}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"substrate": {"fn": "smooth"}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"substrate": "smooth"})


def test_config_validation_errors():
    for bad in (
        dict(function="bumpy"),
        dict(task_p1="descend"),
        dict(runs=0),
        dict(grid_points=1),
        dict(grid_lo=2.0, grid_hi=-2.0),
        dict(bhatt_mode="both"),
        dict(sample_size=99),
    ):
        with pytest.raises(ConfigError):
            ExperimentConfig(**bad).validate()


def test_config_from_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"experiment": {"runs": 3}}))
    assert ExperimentConfig.from_file(path).runs == 3
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(path)
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(path)


def test_trajectory_seed_derivation():
    a = trajectory_seed(1, 0)
    b = trajectory_seed(1, 1)
    assert a.entropy == b.entropy == 1
    assert a.spawn_key == (0,) and b.spawn_key == (1,)
    sa = np.random.default_rng(a).random(4)
    sb = np.random.default_rng(b).random(4)
    assert not np.array_equal(sa, sb)
    assert np.array_equal(sa, np.random.default_rng(trajectory_seed(1, 0)).random(4))


def test_measure_series_rows_order_and_count():
    per_run = {(p, m): np.arange(22, dtype=float).reshape(2, 11)
               for p in POPULATIONS for m in MEASURES}
    series = MeasureSeries.from_runs(per_run)
    rows = list(series.rows())
    assert len(rows) == 66
    assert [r[0] for r in rows[:6]] == [0] * 6
    assert [r[1] for r in rows[:6]] == ["P1", "P1", "P1", "P2", "P2", "P2"]
    assert [r[2] for r in rows[:6]] == ["dist", "kld", "bhatt"] * 2
    assert rows[-1][0] == 10
    for _, _, _, mean, lo, hi in rows:
        assert lo <= mean <= hi


def test_run_batch_single_run_has_zero_width_ci():
    cfg = ExperimentConfig(runs=1, generations=2)
    series = run_batch(cfg)
    assert series.runs == 1
    for _, _, _, mean, lo, hi in series.rows():
        assert lo == mean == hi

    # the batch mean of one run is that run's measures
    states = run_trajectory(cfg, trajectory_seed(cfg.master_seed, 0))
    t1, _ = measure_generation(states[2], cfg.grid(), cfg.objective_kind())
    assert series.mean[("P1", "dist")][2] == t1.dist
    assert series.mean[("P1", "bhatt")][2] == t1.bhatt


def test_run_batch_deterministic():
    cfg = ExperimentConfig(runs=4, generations=2)
    a = run_batch(cfg)
    b = run_batch(cfg)
    for key in a.mean:
        assert np.array_equal(a.mean[key], b.mean[key])
        assert np.array_equal(a.ci_lo[key], b.ci_lo[key])


def test_run_batch_workers_do_not_change_results():
    cfg = ExperimentConfig(runs=6, generations=2)
    serial = run_batch(cfg, workers=1)
    parallel = run_batch(cfg, workers=3)
    for key in serial.mean:
        assert np.array_equal(serial.mean[key], parallel.mean[key])
        assert np.array_equal(serial.ci_hi[key], parallel.ci_hi[key])


def test_run_batch_per_run_hook_sees_runs_in_order():
    cfg = ExperimentConfig(runs=5, generations=1)
    seen = []
    run_batch(cfg, per_run=lambda r, states: seen.append((r, len(states))))
    assert seen == [(0, 2), (1, 2), (2, 2), (3, 2), (4, 2)]


def test_run_batch_validates_config_first():
    with pytest.raises(ConfigError):
        run_batch(ExperimentConfig(runs=0))


def test_ci_width_helper():
    cfg = ExperimentConfig(runs=3, generations=1)
    series = run_batch(cfg)
    width = series.ci_width("P1", "dist")
    assert np.array_equal(width, series.ci_hi[("P1", "dist")] - series.ci_lo[("P1", "dist")])
    assert np.all(width >= 0.0)
