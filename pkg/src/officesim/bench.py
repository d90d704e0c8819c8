"""Micro-benchmark of the two engine cores on identical seeded workloads."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .engine import available_backends, run_day_raw
from .params import ModelParams
from .rng import derive_run_seed, grid_point_key


@dataclass(frozen=True)
class BenchResult:
    backend: str
    runs: int
    seconds: float

    @property
    def ms_per_run(self) -> float:
        return 1000.0 * self.seconds / self.runs


def default_bench_params() -> ModelParams:
    return ModelParams(n_agents=100, n_extroverts=50)


def run_benchmark(
    runs: int = 10,
    params: ModelParams | None = None,
    master_seed: int = 0,
) -> list[BenchResult]:
    """Time every available backend over the same seeds.

    The runs double as a parity smoke test: all backends must produce the
    same integer history draw for draw.
    """
    if params is None:
        params = default_bench_params()
    key = grid_point_key(params)
    seeds = [derive_run_seed(master_seed, key, i) for i in range(runs)]
    results = []
    reference: list[list[int]] | None = None
    for backend in available_backends():
        t0 = time.perf_counter()
        cums = [run_day_raw(params, seed, backend=backend).cum for seed in seeds]
        elapsed = time.perf_counter() - t0
        if reference is None:
            reference = cums
        elif cums != reference:
            raise AssertionError(f"backend {backend!r} disagrees with {available_backends()[0]!r}")
        results.append(BenchResult(backend=backend, runs=runs, seconds=elapsed))
    return results
