"""Ensemble driver: parameter grids, figure presets, parallel sweeps.

Seeds are derived from (master seed, grid-point parameter values, run index),
so the emitted numbers are identical for any worker count or grid ordering.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass

from .engine import run_day
from .metrics import EnsembleStats, RunRecord, aggregate
from .params import ModelParams, ParamError
from .rng import derive_run_seed, grid_point_key

PRESET_NAMES = ("fig1", "fig2", "fig3", "fig4", "fig5", "long_talks")

_ETA_STEP_05 = tuple(k / 20 for k in range(21))

_SEED_LIMIT = 1 << 64


class SweepError(RuntimeError):
    """A grid point failed; carries the point identification."""


@dataclass(frozen=True)
class SweepSpec:
    base: ModelParams
    eta_grid: tuple[float, ...]
    q_grid: tuple[float, ...]
    d_grid: tuple[int, ...] | None = None
    runs_per_point: int = 1000
    master_seed: int = 0
    retain_series: bool = False
    trace: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "eta_grid", tuple(self.eta_grid))
        object.__setattr__(self, "q_grid", tuple(self.q_grid))
        if self.d_grid is not None:
            object.__setattr__(self, "d_grid", tuple(self.d_grid))
        if not self.eta_grid:
            raise ParamError("eta_grid must not be empty")
        for eta in self.eta_grid:
            if not 0.0 <= eta <= 1.0:
                raise ParamError(f"eta must lie in [0, 1], got {eta}")
        if not self.q_grid:
            raise ParamError("q_grid must not be empty")
        for q in self.q_grid:
            if q < 0:
                raise ParamError(f"q must be >= 0, got {q}")
        if self.d_grid is not None:
            for dmax in self.d_grid:
                if dmax < 1:
                    raise ParamError(f"D must be >= 1, got {dmax}")
        if self.runs_per_point < 1:
            raise ParamError(f"runs_per_point must be >= 1, got {self.runs_per_point}")
        if not 0 <= self.master_seed < _SEED_LIMIT:
            raise ParamError("master_seed must fit in 64 bits")


@dataclass(frozen=True)
class PointResult:
    params: ModelParams
    requested_eta: float
    stats: EnsembleStats
    duration_s: float
    trace_record: RunRecord | None = None


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    points: tuple[PointResult, ...]
    duration_s: float


def grid_points(spec: SweepSpec) -> list[tuple[ModelParams, float]]:
    """Expand the grids into concrete parameter sets, (D, q, eta)-major.

    The extrovert count is round(eta * N) (banker's rounding); consumers see
    the realized fraction n_extroverts/N next to the requested one.
    """
    d_grid = spec.d_grid if spec.d_grid is not None else (spec.base.max_duration,)
    points = []
    for dmax in d_grid:
        for q in spec.q_grid:
            for eta in spec.eta_grid:
                params = spec.base.replace(
                    n_extroverts=round(eta * spec.base.n_agents),
                    contact_rate=float(q),
                    max_duration=int(dmax),
                )
                points.append((params, eta))
    return points


def preset(name: str) -> SweepSpec:
    """The canonical experiment grids, by figure name.

    Callers overlay run counts or seeds with ``dataclasses.replace``.
    """
    base = ModelParams(n_agents=100, n_extroverts=50)
    if name == "fig1":
        return SweepSpec(
            base,
            eta_grid=(0.5,),
            q_grid=(2.0,),
            runs_per_point=1,
            retain_series=True,
            trace=True,
        )
    if name == "fig2":
        return SweepSpec(base, eta_grid=_ETA_STEP_05, q_grid=(2.0,))
    if name == "fig3":
        return SweepSpec(
            base, eta_grid=_ETA_STEP_05, q_grid=(0.5, 1.0, 2.0, 4.0, 1000.0)
        )
    if name == "fig4":
        return SweepSpec(
            base,
            eta_grid=(0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95),
            q_grid=(0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0),
        )
    if name == "fig5":
        return SweepSpec(
            base,
            eta_grid=(0.5,),
            q_grid=(0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0),
        )
    if name == "long_talks":
        return SweepSpec(
            base,
            eta_grid=_ETA_STEP_05,
            q_grid=(0.5, 1.0, 2.0, 4.0),
            d_grid=(60,),
        )
    raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")


def _run_point(task) -> PointResult:
    params, requested_eta, runs, master_seed, retain_series, trace, backend = task
    t0 = time.perf_counter()
    key = grid_point_key(params)
    trace_ids = (0, params.n_extroverts) if trace else None
    records = []
    for run_index in range(runs):
        seed = derive_run_seed(master_seed, key, run_index)
        records.append(
            run_day(
                params,
                seed,
                want_series=retain_series,
                trace_ids=trace_ids if run_index == 0 else None,
                backend=backend,
            )
        )
    stats = aggregate(records)
    return PointResult(
        params=params,
        requested_eta=requested_eta,
        stats=stats,
        duration_s=time.perf_counter() - t0,
        trace_record=records[0] if trace else None,
    )


def _point_label(params: ModelParams) -> str:
    return (
        f"eta={params.eta:g} q={params.contact_rate:g} D={params.max_duration}"
    )


def run_sweep(
    spec: SweepSpec,
    workers: int = 1,
    backend: str | None = None,
    progress=None,
) -> SweepResult:
    """Run every grid point, R runs each; fail fast on any point error.

    ``workers``: 0 picks os.cpu_count(), 1 runs inline, more fan out over a
    process pool.  Results are assembled in grid-definition order, so the
    output never depends on scheduling.
    """
    t0 = time.perf_counter()
    tasks = [
        (
            params,
            requested_eta,
            spec.runs_per_point,
            spec.master_seed,
            spec.retain_series,
            spec.trace,
            backend,
        )
        for params, requested_eta in grid_points(spec)
    ]
    results: list[PointResult | None] = [None] * len(tasks)
    if workers == 0:
        workers = os.cpu_count() or 1
    if workers == 1 or len(tasks) == 1:
        for i, task in enumerate(tasks):
            try:
                results[i] = _run_point(task)
            except Exception as exc:
                raise SweepError(f"grid point {_point_label(task[0])} failed: {exc}") from exc
            if progress is not None:
                progress(i + 1, len(tasks), results[i])
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            futures = {pool.submit(_run_point, task): i for i, task in enumerate(tasks)}
            done = 0
            for future in as_completed(futures):
                i = futures[future]
                try:
                    results[i] = future.result()
                except Exception as exc:
                    raise SweepError(
                        f"grid point {_point_label(tasks[i][0])} failed: {exc}"
                    ) from exc
                done += 1
                if progress is not None:
                    progress(done, len(tasks), results[i])
    return SweepResult(
        spec=spec,
        points=tuple(results),  # type: ignore[arg-type]
        duration_s=time.perf_counter() - t0,
    )
