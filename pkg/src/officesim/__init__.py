"""Agent-based workplace interaction and productivity simulator."""

__version__ = "0.1.0"

from .engine import available_backends, default_backend, run_day, run_day_raw
from .metrics import EnsembleStats, RunRecord, aggregate
from .params import ModelParams, ParamError, Stereotype
from .rng import Pcg32, RunSeed, derive_run_seed, grid_point_key
from .sweep import PRESET_NAMES, SweepError, SweepResult, SweepSpec, preset, run_sweep

__all__ = [
    "__version__",
    "available_backends",
    "default_backend",
    "run_day",
    "run_day_raw",
    "EnsembleStats",
    "RunRecord",
    "aggregate",
    "ModelParams",
    "ParamError",
    "Stereotype",
    "Pcg32",
    "RunSeed",
    "derive_run_seed",
    "grid_point_key",
    "PRESET_NAMES",
    "SweepError",
    "SweepResult",
    "SweepSpec",
    "preset",
    "run_sweep",
]
