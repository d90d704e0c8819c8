"""Command-line interface.

Subcommands: ``run`` (one ensemble at fixed parameters), ``sweep`` (explicit
grids), ``preset`` (canonical figure grids), ``validate`` (self-check suite),
``bench`` (backend comparison).  Flags override config-file values; the
effective configuration is echoed into the emitted manifest.

Exit codes: 0 success, 2 usage error, 3 runtime or validation failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from . import __version__
from .bench import run_benchmark
from .csvio import emit_sweep
from .engine import available_backends, default_backend
from .params import ModelParams, ParamError
from .sweep import PRESET_NAMES, SweepError, SweepSpec, preset, run_sweep
from .validate import run_all


class UsageError(Exception):
    """Invalid flag or config value; exits with code 2."""


_SCALAR_DEFAULTS = {
    "n": 100,
    "eta": 0.5,
    "q": 2.0,
    "d": 20,
    "t": 480,
    "tau_e": 1.0,
    "tau_i": 5.0,
    "runs": 1000,
    "seed": 0,
    "out": "out",
    "series": False,
    "workers": 0,
    "backend": None,
}


def _parse_seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a decimal or 0x-hex integer, got {text!r}"
        ) from None
    if not 0 <= value < (1 << 64):
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _parse_float_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _parse_int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"expected a boolean, got {text!r}")


def _config_converters(command: str) -> dict:
    converters = {
        "n": int,
        "eta": float,
        "q": float,
        "d": int,
        "t": int,
        "tau_e": float,
        "tau_i": float,
        "runs": int,
        "seed": lambda s: int(s, 0),
        "out": str,
        "series": _parse_bool,
        "workers": int,
        "backend": str,
    }
    if command == "sweep":
        converters["eta"] = lambda s: [float(x) for x in s.split(",") if x.strip()]
        converters["q"] = converters["eta"]
        converters["d"] = lambda s: [int(x) for x in s.split(",") if x.strip()]
    return converters


def _load_config_file(path: Path, command: str) -> dict:
    """Parse a key=value config file (``#`` comments, blank lines allowed)."""
    converters = _config_converters(command)
    values = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}") from exc
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in converters:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = converters[key](raw_value.strip())
        except (ValueError, UsageError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def _effective(args: argparse.Namespace, command: str, keys: tuple[str, ...]) -> dict:
    """Defaults, overlaid by the config file, overlaid by explicit flags."""
    cfg = {}
    for key in keys:
        default = _SCALAR_DEFAULTS[key]
        if command == "sweep" and key in ("eta", "q", "d"):
            default = [default]
        cfg[key] = default
    config_path = getattr(args, "config", None)
    if config_path is not None:
        for key, value in _load_config_file(config_path, command).items():
            if key in cfg:
                cfg[key] = value
            else:
                raise UsageError(
                    f"config key {key!r} does not apply to the {command!r} command"
                )
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _use_color(stream) -> bool:
    return stream.isatty() and not os.environ.get("NO_COLOR")


def _paint(text: str, code: str, stream) -> str:
    if _use_color(stream):
        return f"\x1b[{code}m{text}\x1b[0m"
    return text


def _progress(done: int, total: int, point) -> None:
    p = point.params
    print(
        f"  [{done}/{total}] eta={p.eta:g} q={p.contact_rate:g} D={p.max_duration}: "
        f"{point.duration_s:.2f}s",
        file=sys.stderr,
    )


def _check_range(name: str, ok: bool, got) -> None:
    if not ok:
        raise UsageError(f"{name}: invalid value {got!r}")


def _validate_common(cfg: dict) -> None:
    _check_range("--runs: must be >= 1", cfg["runs"] >= 1, cfg["runs"])
    _check_range("--workers: must be >= 0", cfg["workers"] >= 0, cfg["workers"])
    if cfg["backend"] is not None and cfg["backend"] not in available_backends():
        raise UsageError(
            f"--backend: {cfg['backend']!r} not available "
            f"(have: {', '.join(available_backends())})"
        )


def _validate_model_scalars(n, eta_values, q_values, d_values, t, tau_e, tau_i) -> None:
    _check_range("--n: must be >= 1", n >= 1, n)
    for eta in eta_values:
        _check_range("--eta: must lie in [0, 1]", 0.0 <= eta <= 1.0, eta)
    for q in q_values:
        _check_range("--q: must be >= 0", q >= 0.0, q)
    for d in d_values:
        _check_range("--d: must be >= 1", d >= 1, d)
    _check_range("--t: must be >= 1", t >= 1, t)
    _check_range("--tau-e: must be > 0", tau_e > 0.0, tau_e)
    _check_range("--tau-i: must be >= --tau-e", tau_i >= tau_e, tau_i)


def _emit(result, cfg: dict, prefix: str, command: str, extra_config: dict) -> int:
    out_dir = Path(cfg["out"])
    config_echo = {"command": command, **extra_config}
    for key in ("runs", "seed", "workers", "series"):
        config_echo[key] = cfg[key]
    config_echo["backend"] = cfg["backend"] or default_backend()
    config_echo["out"] = str(out_dir)
    try:
        files = emit_sweep(
            result, out_dir, prefix, version=__version__, config=config_echo
        )
    except OSError as exc:
        print(f"officesim: cannot write output: {exc}", file=sys.stderr)
        return 3
    for path in files:
        print(f"wrote {path}")
    return 0


def _run_spec(spec: SweepSpec, cfg: dict) -> tuple[int, object]:
    try:
        result = run_sweep(
            spec,
            workers=cfg["workers"],
            backend=cfg["backend"],
            progress=_progress,
        )
    except SweepError as exc:
        print(f"officesim: {exc}", file=sys.stderr)
        return 3, None
    return 0, result


def cmd_run(args: argparse.Namespace) -> int:
    keys = ("n", "eta", "q", "d", "t", "tau_e", "tau_i", "runs", "seed", "out",
            "series", "workers", "backend")
    cfg = _effective(args, "run", keys)
    _validate_common(cfg)
    _validate_model_scalars(
        cfg["n"], [cfg["eta"]], [cfg["q"]], [cfg["d"]], cfg["t"], cfg["tau_e"], cfg["tau_i"]
    )
    base = ModelParams(
        n_agents=cfg["n"],
        n_extroverts=round(cfg["eta"] * cfg["n"]),
        horizon=cfg["t"],
        max_duration=cfg["d"],
        contact_rate=cfg["q"],
        tau_extrovert=cfg["tau_e"],
        tau_introvert=cfg["tau_i"],
    )
    spec = SweepSpec(
        base=base,
        eta_grid=(cfg["eta"],),
        q_grid=(cfg["q"],),
        d_grid=(cfg["d"],),
        runs_per_point=cfg["runs"],
        master_seed=cfg["seed"],
        retain_series=cfg["series"],
    )
    code, result = _run_spec(spec, cfg)
    if code:
        return code
    extra = {k: cfg[k] for k in ("n", "eta", "q", "d", "t", "tau_e", "tau_i")}
    return _emit(result, cfg, "run", "run", extra)


def cmd_sweep(args: argparse.Namespace) -> int:
    keys = ("n", "eta", "q", "d", "t", "tau_e", "tau_i", "runs", "seed", "out",
            "series", "workers", "backend")
    cfg = _effective(args, "sweep", keys)
    _validate_common(cfg)
    _validate_model_scalars(
        cfg["n"], cfg["eta"], cfg["q"], cfg["d"], cfg["t"], cfg["tau_e"], cfg["tau_i"]
    )
    base = ModelParams(
        n_agents=cfg["n"],
        n_extroverts=0,
        horizon=cfg["t"],
        max_duration=cfg["d"][0],
        contact_rate=cfg["q"][0],
        tau_extrovert=cfg["tau_e"],
        tau_introvert=cfg["tau_i"],
    )
    spec = SweepSpec(
        base=base,
        eta_grid=tuple(cfg["eta"]),
        q_grid=tuple(cfg["q"]),
        d_grid=tuple(cfg["d"]),
        runs_per_point=cfg["runs"],
        master_seed=cfg["seed"],
        retain_series=cfg["series"],
    )
    code, result = _run_spec(spec, cfg)
    if code:
        return code
    extra = {
        "n": cfg["n"],
        "eta": cfg["eta"],
        "q": cfg["q"],
        "d": cfg["d"],
        "t": cfg["t"],
        "tau_e": cfg["tau_e"],
        "tau_i": cfg["tau_i"],
    }
    return _emit(result, cfg, "sweep", "sweep", extra)


def cmd_preset(args: argparse.Namespace) -> int:
    keys = ("runs", "seed", "out", "series", "workers", "backend")
    cfg = _effective(args, "preset", keys)
    _validate_common(cfg)
    spec = preset(args.name)
    overrides: dict = {"master_seed": cfg["seed"]}
    if args.runs is not None or "runs" in _explicit_config_keys(args, "preset"):
        overrides["runs_per_point"] = cfg["runs"]
    if cfg["series"]:
        overrides["retain_series"] = True
    spec = dataclasses.replace(spec, **overrides)
    print(
        f"preset {args.name}: {len(spec.eta_grid) * len(spec.q_grid) * len(spec.d_grid or (0,))} "
        f"grid points x {spec.runs_per_point} runs",
        file=sys.stderr,
    )
    code, result = _run_spec(spec, cfg)
    if code:
        return code
    return _emit(result, cfg, args.name, "preset", {"preset": args.name})


def _explicit_config_keys(args: argparse.Namespace, command: str) -> set:
    config_path = getattr(args, "config", None)
    if config_path is None:
        return set()
    return set(_load_config_file(config_path, command))


def cmd_validate(args: argparse.Namespace) -> int:
    backend = args.backend
    if backend is not None and backend not in available_backends():
        raise UsageError(
            f"--backend: {backend!r} not available (have: {', '.join(available_backends())})"
        )
    results = run_all(
        invariant_configs=args.configs,
        oracle_runs=args.oracle_runs,
        backend=backend,
    )
    failed = 0
    for check in results:
        if check.passed:
            status = _paint("PASS", "32", sys.stdout)
        else:
            status = _paint("FAIL", "31", sys.stdout)
            failed += 1
        print(f"{status} {check.name}: {check.detail}")
    if failed:
        print(f"officesim: {failed} check(s) failed", file=sys.stderr)
        return 3
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    runs = args.runs if args.runs is not None else 10
    if runs < 1:
        raise UsageError(f"--runs: must be >= 1, got {runs}")
    results = run_benchmark(runs=runs)
    baseline = None
    for item in results:
        line = f"{item.backend:>9}: {item.ms_per_run:8.2f} ms/run  ({item.runs} runs)"
        if item.backend == "python":
            baseline = item.ms_per_run
        print(line)
    if baseline is not None and len(results) > 1:
        for item in results:
            if item.backend != "python":
                print(f"speedup over python: {baseline / item.ms_per_run:.1f}x")
    return 0


def _add_io_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--runs", type=int, default=None, help="runs per grid point")
    parser.add_argument(
        "--seed", type=_parse_seed, default=None, help="master seed (decimal or 0x-hex)"
    )
    parser.add_argument("--out", type=str, default=None, help="output directory")
    parser.add_argument(
        "--series",
        action="store_true",
        default=None,
        help="also emit per-minute time-series CSVs",
    )
    parser.add_argument(
        "--workers", type=int, default=None, help="parallel workers (0 = auto)"
    )
    parser.add_argument(
        "--backend",
        choices=("compiled", "python"),
        default=None,
        help="engine core (default: compiled when built)",
    )
    parser.add_argument(
        "--config", type=Path, default=None, help="key=value config file"
    )


def _add_model_flags(parser: argparse.ArgumentParser, listy: bool) -> None:
    if listy:
        parser.add_argument(
            "--eta", type=_parse_float_list, default=None,
            help="extrovert fractions, comma-separated",
        )
        parser.add_argument(
            "--q", type=_parse_float_list, default=None,
            help="mean contact attempts, comma-separated",
        )
        parser.add_argument(
            "--d", type=_parse_int_list, default=None,
            help="max conversation durations, comma-separated",
        )
    else:
        parser.add_argument("--eta", type=float, default=None, help="extrovert fraction")
        parser.add_argument("--q", type=float, default=None, help="mean contact attempts")
        parser.add_argument("--d", type=int, default=None, help="max conversation duration")
    parser.add_argument("--n", type=int, default=None, help="number of agents")
    parser.add_argument("--t", type=int, default=None, help="minutes per day")
    parser.add_argument("--tau-e", dest="tau_e", type=float, default=None,
                        help="extrovert threshold divisor")
    parser.add_argument("--tau-i", dest="tau_i", type=float, default=None,
                        help="introvert threshold divisor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="officesim",
        description="Agent-based workplace interaction and productivity simulator.",
    )
    parser.add_argument("--version", action="version", version=f"officesim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="one ensemble at fixed parameters")
    _add_model_flags(run_p, listy=False)
    _add_io_flags(run_p)
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="ensembles over explicit grids")
    _add_model_flags(sweep_p, listy=True)
    _add_io_flags(sweep_p)
    sweep_p.set_defaults(func=cmd_sweep)

    preset_p = sub.add_parser("preset", help="canonical figure-reproduction grids")
    preset_p.add_argument("name", choices=PRESET_NAMES)
    _add_io_flags(preset_p)
    preset_p.set_defaults(func=cmd_preset)

    validate_p = sub.add_parser("validate", help="run the invariant and oracle suites")
    validate_p.add_argument("--configs", type=int, default=100,
                            help="randomized configurations for the invariant suite")
    validate_p.add_argument("--oracle-runs", type=int, default=100_000,
                            help="Monte Carlo runs for the two-agent oracle")
    validate_p.add_argument("--backend", choices=("compiled", "python"), default=None)
    validate_p.set_defaults(func=cmd_validate)

    bench_p = sub.add_parser("bench", help="compare engine cores")
    bench_p.add_argument("--runs", type=int, default=None, help="days per backend")
    bench_p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"officesim: error: {exc}", file=sys.stderr)
        return 2
    except ParamError as exc:
        print(f"officesim: error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("officesim: interrupted", file=sys.stderr)
        return 3
    except Exception as exc:  # runtime failures: IO, worker crashes, ...
        print(f"officesim: runtime error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    raise SystemExit(main())
