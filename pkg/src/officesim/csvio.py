"""CSV and manifest emission.

The end-of-day column order is a compatibility contract: downstream plotting
scripts key on it.  Absent subgroups (eta 0 or 1) serialize as empty fields,
never as 0 or NaN, because 0 is a legal productivity value.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from pathlib import Path

from .metrics import SeriesBlock, TraceBlock
from .sweep import PointResult, SweepResult

END_OF_DAY_HEADER = (
    "eta,q,D,N,runs,"
    "pi_e_mean,pi_e_se,pi_i_mean,pi_i_se,pi_w_mean,pi_w_se,"
    "lambda_e_mean,lambda_e_se,lambda_i_mean,lambda_i_se,lambda_w_mean,lambda_w_se"
).split(",")

SERIES_HEADER = ("t", "pi_e", "pi_i", "pi_w", "lambda_e", "lambda_i", "lambda_w")

TRACE_HEADER = ("t", "agent_id", "stereotype", "L", "pi")


def fmt_float(x: float | None) -> str:
    return "" if x is None else format(x, ".6g")


def _sorted_points(result: SweepResult) -> list[PointResult]:
    return sorted(
        result.points,
        key=lambda pt: (pt.params.max_duration, pt.params.contact_rate, pt.params.eta),
    )


def _end_of_day_row(pt: PointResult) -> list[str]:
    p = pt.params
    mean = pt.stats.mean_end
    err = pt.stats.stderr_end
    return [
        fmt_float(p.eta),
        fmt_float(p.contact_rate),
        str(p.max_duration),
        str(p.n_agents),
        str(pt.stats.n_runs),
        fmt_float(mean.pi_e),
        fmt_float(err.pi_e),
        fmt_float(mean.pi_i),
        fmt_float(err.pi_i),
        fmt_float(mean.pi_w),
        fmt_float(err.pi_w),
        fmt_float(mean.lam_e),
        fmt_float(err.lam_e),
        fmt_float(mean.lam_i),
        fmt_float(err.lam_i),
        fmt_float(mean.lam_w),
        fmt_float(err.lam_w),
    ]


def _open_writer(path: Path):
    handle = open(path, "w", newline="")
    return handle, csv.writer(handle, lineterminator="\n")


def write_end_of_day_csv(path: Path, result: SweepResult) -> None:
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(END_OF_DAY_HEADER)
        for pt in _sorted_points(result):
            writer.writerow(_end_of_day_row(pt))


def write_series_csv(path: Path, series: SeriesBlock) -> None:
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(SERIES_HEADER)
        for i in range(len(series.pi_w)):
            writer.writerow(
                [
                    str(i + 1),
                    fmt_float(series.pi_e[i] if series.pi_e is not None else None),
                    fmt_float(series.pi_i[i] if series.pi_i is not None else None),
                    fmt_float(series.pi_w[i]),
                    fmt_float(series.lam_e[i] if series.lam_e is not None else None),
                    fmt_float(series.lam_i[i] if series.lam_i is not None else None),
                    fmt_float(series.lam_w[i]),
                ]
            )


def write_trace_csv(path: Path, trace: TraceBlock) -> None:
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(TRACE_HEADER)
        for agent in (trace.extrovert, trace.introvert):
            for t in range(len(agent.motivation)):
                writer.writerow(
                    [
                        str(t),
                        str(agent.agent_id),
                        agent.stereotype.short,
                        str(agent.motivation[t]),
                        fmt_float(agent.pi[t]),
                    ]
                )


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    path: Path,
    *,
    version: str,
    config: dict,
    master_seed: int,
    files: list[Path],
    timings_s: dict,
) -> None:
    manifest = {
        "tool": "officesim",
        "version": version,
        "created_unix": time.time(),
        "config": config,
        "master_seed": master_seed,
        "files": [
            {
                "name": f.name,
                "sha256": file_sha256(f),
                "bytes": f.stat().st_size,
            }
            for f in files
        ],
        "timings_s": timings_s,
    }
    with open(path, "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def emit_sweep(
    result: SweepResult,
    out_dir: Path,
    prefix: str,
    *,
    version: str,
    config: dict,
) -> list[Path]:
    """Write all files for a sweep; returns the paths, manifest last.

    Series and trace files are only produced for points that retained them;
    with one grid point they are named ``<prefix>_series.csv`` and
    ``<prefix>_trace.csv``, with several the (D, q, eta)-sorted row index is
    appended, matching the row order of the end-of-day CSV.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []

    eod_path = out_dir / f"{prefix}_end_of_day.csv"
    write_end_of_day_csv(eod_path, result)
    files.append(eod_path)

    ordered = _sorted_points(result)
    single = len(ordered) == 1
    timings_points = []
    for i, pt in enumerate(ordered):
        timings_points.append(
            {
                "eta": pt.params.eta,
                "q": pt.params.contact_rate,
                "D": pt.params.max_duration,
                "seconds": round(pt.duration_s, 3),
            }
        )
        suffix = "" if single else f"_{i:03d}"
        if pt.stats.mean_series is not None:
            series_path = out_dir / f"{prefix}_series{suffix}.csv"
            write_series_csv(series_path, pt.stats.mean_series)
            files.append(series_path)
        if pt.trace_record is not None and pt.trace_record.trace is not None:
            trace_path = out_dir / f"{prefix}_trace{suffix}.csv"
            write_trace_csv(trace_path, pt.trace_record.trace)
            files.append(trace_path)

    manifest_path = out_dir / f"{prefix}_manifest.json"
    write_manifest(
        manifest_path,
        version=version,
        config=config,
        master_seed=result.spec.master_seed,
        files=files,
        timings_s={"total": round(result.duration_s, 3), "points": timings_points},
    )
    files.append(manifest_path)
    return files
