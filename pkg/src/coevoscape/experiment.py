"""Batch orchestration: many independent coevolutionary runs, aggregated
per generation into means with 95% confidence intervals.

Every run r of a batch draws its RNG from
``numpy.random.SeedSequence(master_seed, spawn_key=(r,))``, so a batch is
fully determined by (config, master_seed), run streams are independent,
and results do not depend on execution order or worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Callable, Iterator

import numpy as np
from scipy import stats

from .evolution import CoevoState, EvoParams, run_trajectory
from .landscape import BHATT_MODES, make_grid, measure_generation
from .substrate import InteractionMode, ObjectiveKind, Task, kind_from_name

POPULATIONS = ("P1", "P2")
MEASURES = ("dist", "kld", "bhatt")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


# config file sections -> flat ExperimentConfig field names
_SECTIONS = {
    "substrate": ("function", "ridge_n"),
    "evolution": ("pop_size", "sample_size", "tournament_size", "mutation_prob",
                  "mutation_sigma", "generations", "init_interval_p1",
                  "init_interval_p2", "sample_with_replacement"),
    "interaction": ("task_p1", "task_p2"),
    "landscape": ("grid_lo", "grid_hi", "grid_points", "dist_grid_factor",
                  "bhatt_mode"),
    "experiment": ("runs", "master_seed", "snapshots"),
}

_TASK_NAMES = {"maximize": Task.MAXIMIZE, "minimize": Task.MINIMIZE}


@dataclass
class ExperimentConfig:
    """Everything a batch needs, in one serializable record.

    None for an init interval or grid bound means "use the substrate's
    default": intervals (0, n) and grid (-n/4, 5n/4) for the ridge function,
    intervals (-3, 3) and grid (-3, 3) for everything else.
    """

    # substrate
    function: str = "smooth"
    ridge_n: float = 8.0
    # evolution
    pop_size: int = 24
    sample_size: int = 12
    tournament_size: int = 2
    mutation_prob: float = 0.5
    mutation_sigma: float = 0.1
    generations: int = 10
    init_interval_p1: tuple[float, float] | None = None
    init_interval_p2: tuple[float, float] | None = None
    sample_with_replacement: bool = False
    # interaction (default: competitive, P1 descends / P2 climbs)
    task_p1: str = "minimize"
    task_p2: str = "maximize"
    # landscape / measures
    grid_lo: float | None = None
    grid_hi: float | None = None
    grid_points: int = 301
    dist_grid_factor: bool = True
    bhatt_mode: str = "hellinger"
    # experiment
    runs: int = 100
    master_seed: int = 1
    snapshots: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        """Build from a sectioned mapping; unknown sections or keys are errors."""
        kwargs = {}
        for section, content in data.items():
            if section not in _SECTIONS:
                raise ConfigError(
                    f"unknown config section {section!r}; expected one of {sorted(_SECTIONS)}"
                )
            if not isinstance(content, dict):
                raise ConfigError(f"config section {section!r} must be a mapping")
            for key, value in content.items():
                if key not in _SECTIONS[section]:
                    raise ConfigError(
                        f"unknown key {key!r} in section {section!r}; "
                        f"expected one of {sorted(_SECTIONS[section])}"
                    )
                if key.startswith("init_interval") and value is not None:
                    value = tuple(float(v) for v in value)
                kwargs[key] = value
        config = cls(**kwargs)
        config.validate()
        return config

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        """Load a JSON config file (see README for the exact keys)."""
        with open(path, "r", encoding="utf-8") as fp:
            try:
                data = json.load(fp)
            except json.JSONDecodeError as e:
                raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must contain a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        """Sectioned mapping mirroring the config file layout."""
        flat = {f.name: getattr(self, f.name) for f in fields(self)}
        out = {}
        for section, keys in _SECTIONS.items():
            out[section] = {
                k: (list(flat[k]) if isinstance(flat[k], tuple) else flat[k])
                for k in keys
            }
        return out

    def validate(self) -> None:
        problems = []
        try:
            self.objective_kind()
        except ValueError as e:
            problems.append(str(e))
        for name in ("task_p1", "task_p2"):
            if getattr(self, name) not in _TASK_NAMES:
                problems.append(
                    f"{name} must be 'maximize' or 'minimize', got {getattr(self, name)!r}"
                )
        try:
            self.evo_params().validate()
        except ValueError as e:
            problems.append(str(e))
        if self.grid_points < 2:
            problems.append(f"grid_points must be >= 2, got {self.grid_points}")
        lo, hi = self._grid_bounds()
        if not (lo < hi):
            problems.append(f"grid bounds must satisfy lo < hi, got ({lo}, {hi})")
        if self.bhatt_mode not in BHATT_MODES:
            problems.append(f"bhatt_mode must be one of {BHATT_MODES}, got {self.bhatt_mode!r}")
        if self.runs < 1:
            problems.append(f"runs must be >= 1, got {self.runs}")
        if problems:
            raise ConfigError("; ".join(problems))

    def objective_kind(self) -> ObjectiveKind:
        return kind_from_name(self.function, self.ridge_n)

    def interaction_mode(self) -> InteractionMode:
        return InteractionMode(_TASK_NAMES[self.task_p1], _TASK_NAMES[self.task_p2])

    def _default_interval(self) -> tuple[float, float]:
        if self.function == "ridge":
            return (0.0, self.ridge_n)
        return (-3.0, 3.0)

    def _grid_bounds(self) -> tuple[float, float]:
        if self.function == "ridge":
            default = (-0.25 * self.ridge_n, 1.25 * self.ridge_n)
        else:
            default = (-3.0, 3.0)
        lo = default[0] if self.grid_lo is None else self.grid_lo
        hi = default[1] if self.grid_hi is None else self.grid_hi
        return lo, hi

    def evo_params(self) -> EvoParams:
        default = self._default_interval()
        return EvoParams(
            pop_size=self.pop_size,
            sample_size=self.sample_size,
            tournament_size=self.tournament_size,
            mutation_prob=self.mutation_prob,
            mutation_sigma=self.mutation_sigma,
            generations=self.generations,
            init_interval_p1=self.init_interval_p1 or default,
            init_interval_p2=self.init_interval_p2 or default,
            sample_with_replacement=self.sample_with_replacement,
        )

    def grid(self) -> np.ndarray:
        lo, hi = self._grid_bounds()
        return make_grid(lo, hi, self.grid_points)


def trajectory_seed(master_seed: int, run_index: int) -> np.random.SeedSequence:
    """Seed for run r of a batch: SeedSequence(master_seed, spawn_key=(r,))."""
    return np.random.SeedSequence(master_seed, spawn_key=(run_index,))


def ci95(samples) -> tuple[float, float, float]:
    """Mean and 95% confidence interval of the mean (Student-t).

    A single sample gives a zero-width interval by convention.
    """
    a = np.asarray(samples, dtype=float)
    if a.size == 0:
        raise ValueError("ci95 needs at least one sample")
    mean = float(a.mean())
    if a.size == 1:
        return mean, mean, mean
    half = float(stats.t.ppf(0.975, a.size - 1) * a.std(ddof=1) / np.sqrt(a.size))
    return mean, mean - half, mean + half


@dataclass
class MeasureSeries:
    """Per-generation measure statistics for both populations of a batch.

    mean/ci_lo/ci_hi are keyed by (population, measure) and hold one value
    per generation.
    """

    generations: np.ndarray
    runs: int
    mean: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)
    ci_lo: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)
    ci_hi: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_runs(cls, per_run: dict[tuple[str, str], np.ndarray]) -> "MeasureSeries":
        """Aggregate raw per-run values, shape (runs, generations+1) per key."""
        some = next(iter(per_run.values()))
        runs, n_gen = some.shape
        series = cls(generations=np.arange(n_gen), runs=runs)
        for key, values in per_run.items():
            mean = np.empty(n_gen)
            lo = np.empty(n_gen)
            hi = np.empty(n_gen)
            for k in range(n_gen):
                mean[k], lo[k], hi[k] = ci95(values[:, k])
            series.mean[key] = mean
            series.ci_lo[key] = lo
            series.ci_hi[key] = hi
        return series

    def rows(self) -> Iterator[tuple[int, str, str, float, float, float]]:
        """Deterministic row order: generation, then population, then measure."""
        for k in range(self.generations.size):
            for pop in POPULATIONS:
                for measure in MEASURES:
                    key = (pop, measure)
                    yield (int(self.generations[k]), pop, measure,
                           float(self.mean[key][k]), float(self.ci_lo[key][k]),
                           float(self.ci_hi[key][k]))

    def ci_width(self, population: str, measure: str) -> np.ndarray:
        key = (population, measure)
        return self.ci_hi[key] - self.ci_lo[key]


def _measure_states(states: list[CoevoState], config: ExperimentConfig
                    ) -> dict[tuple[str, str], np.ndarray]:
    kind = config.objective_kind()
    grid = config.grid()
    out = {(pop, m): np.empty(len(states)) for pop in POPULATIONS for m in MEASURES}
    for k, state in enumerate(states):
        t1, t2 = measure_generation(state, grid, kind,
                                    grid_factor=config.dist_grid_factor,
                                    bhatt_mode=config.bhatt_mode)
        for pop, triple in (("P1", t1), ("P2", t2)):
            out[(pop, "dist")][k] = triple.dist
            out[(pop, "kld")][k] = triple.kld
            out[(pop, "bhatt")][k] = triple.bhatt
    return out


def _run_one(config: ExperimentConfig, run_index: int) -> dict[tuple[str, str], np.ndarray]:
    states = run_trajectory(config, trajectory_seed(config.master_seed, run_index))
    return _measure_states(states, config)


def run_batch(config: ExperimentConfig, workers: int = 1,
              per_run: Callable[[int, list[CoevoState]], None] | None = None
              ) -> MeasureSeries:
    """Run `config.runs` independent trajectories and aggregate their measures.

    Results are collected and aggregated in run-index order, so the series
    is identical for any worker count. `per_run(r, states)` is an optional
    hook (e.g. snapshot writing) and forces serial execution. Any failing
    run aborts the batch with its run index and seed derivation reported.
    """
    config.validate()
    results: list[dict[tuple[str, str], np.ndarray]] = []
    if workers <= 1 or per_run is not None:
        for r in range(config.runs):
            try:
                states = run_trajectory(config, trajectory_seed(config.master_seed, r))
                measures = _measure_states(states, config)
            except Exception as e:
                raise RuntimeError(_run_failure(config, r, e)) from e
            if per_run is not None:
                per_run(r, states)
            results.append(measures)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_one, config, r) for r in range(config.runs)]
            for r, future in enumerate(futures):
                try:
                    results.append(future.result())
                except Exception as e:
                    raise RuntimeError(_run_failure(config, r, e)) from e

    per_run_values = {
        key: np.stack([res[key] for res in results])
        for key in results[0]
    }
    return MeasureSeries.from_runs(per_run_values)


def _run_failure(config: ExperimentConfig, run_index: int, error: Exception) -> str:
    return (f"run {run_index} failed (seed = SeedSequence({config.master_seed}, "
            f"spawn_key=({run_index},))): {error}")
