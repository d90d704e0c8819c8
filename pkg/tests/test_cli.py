"""CLI behavior: exit codes, config layering, emitted files."""

from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from officesim import __version__
from officesim.cli import main
from officesim.csvio import (
    END_OF_DAY_HEADER,
    SERIES_HEADER,
    TRACE_HEADER,
    file_sha256,
    fmt_float,
    write_end_of_day_csv,
)
from officesim.params import ModelParams
from officesim.sweep import SweepSpec, run_sweep


def _rows(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"officesim {__version__}"


def test_missing_subcommand_is_usage_error(capsys):
    assert main([]) == 2


def test_unknown_flag_is_usage_error():
    assert main(["run", "--frobnicate"]) == 2


@pytest.mark.parametrize(
    "argv,fragment",
    [
        (["run", "--eta", "1.5"], "--eta: must lie in [0, 1]"),
        (["run", "--q", "-2"], "--q: must be >= 0"),
        (["run", "--n", "0"], "--n: must be >= 1"),
        (["run", "--d", "0"], "--d: must be >= 1"),
        (["run", "--t", "0"], "--t: must be >= 1"),
        (["run", "--runs", "0"], "--runs: must be >= 1"),
        (["run", "--workers", "-1"], "--workers: must be >= 0"),
        (["run", "--tau-e", "0"], "--tau-e: must be > 0"),
        (["run", "--tau-e", "2", "--tau-i", "1"], "--tau-i: must be >= --tau-e"),
    ],
)
def test_range_validation_messages(argv, fragment, capsys, tmp_path):
    assert main(argv + ["--out", str(tmp_path)]) == 2
    assert fragment in capsys.readouterr().err


def test_seed_parsing(tmp_path, capsys):
    out = tmp_path / "o"
    argv = ["run", "--n", "4", "--t", "10", "--runs", "1", "--out", str(out)]
    assert main(argv + ["--seed", "0x10"]) == 0
    assert main(argv + ["--seed", "18446744073709551616"]) == 2  # 2^64
    assert main(argv + ["--seed", "banana"]) == 2


def test_run_roundtrip_matches_api(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(
        [
            "run",
            "--n", "10",
            "--eta", "0.5",
            "--q", "1.5",
            "--d", "4",
            "--t", "40",
            "--runs", "3",
            "--seed", "7",
            "--out", str(out),
        ]
    )
    assert code == 0
    captured = capsys.readouterr()
    assert f"wrote {out / 'run_end_of_day.csv'}" in captured.out

    rows = _rows(out / "run_end_of_day.csv")
    assert rows[0] == END_OF_DAY_HEADER
    assert len(rows) == 2
    row = dict(zip(rows[0], rows[1]))
    assert row["eta"] == "0.5" and row["q"] == "1.5" and row["D"] == "4"
    assert row["N"] == "10" and row["runs"] == "3"

    # The same spec through the library yields a byte-identical CSV.
    spec = SweepSpec(
        base=ModelParams(n_agents=10, n_extroverts=5, horizon=40, max_duration=4,
                         contact_rate=1.5),
        eta_grid=(0.5,),
        q_grid=(1.5,),
        d_grid=(4,),
        runs_per_point=3,
        master_seed=7,
    )
    expected = tmp_path / "expected.csv"
    write_end_of_day_csv(expected, run_sweep(spec))
    assert expected.read_bytes() == (out / "run_end_of_day.csv").read_bytes()


def test_float_formatting_is_6g(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--n", "7", "--t", "33", "--runs", "2", "--out", str(out)]) == 0
    rows = _rows(out / "run_end_of_day.csv")
    row = dict(zip(rows[0], rows[1]))
    value = float(row["pi_w_mean"])
    assert row["pi_w_mean"] == fmt_float(value) == format(value, ".6g")


def test_empty_subgroup_fields_are_empty_strings(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--n", "6", "--eta", "0", "--t", "30", "--runs", "2",
                 "--out", str(out)]) == 0
    row = dict(zip(*_rows(out / "run_end_of_day.csv")))
    assert row["pi_e_mean"] == "" and row["lambda_e_se"] == ""
    assert row["pi_i_mean"] != ""


def test_manifest_checksums_and_echo(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--n", "6", "--t", "20", "--runs", "2", "--seed", "5",
                 "--series", "--out", str(out)]) == 0
    manifest = json.loads((out / "run_manifest.json").read_text())
    assert manifest["tool"] == "officesim"
    assert manifest["version"] == __version__
    assert manifest["master_seed"] == 5
    assert manifest["config"]["command"] == "run"
    assert manifest["config"]["runs"] == 2
    names = [entry["name"] for entry in manifest["files"]]
    assert names == ["run_end_of_day.csv", "run_series.csv"]
    for entry in manifest["files"]:
        target = out / entry["name"]
        assert entry["sha256"] == file_sha256(target)
        assert entry["bytes"] == target.stat().st_size
    assert manifest["timings_s"]["points"][0]["seconds"] >= 0.0


def test_series_csv_shape(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--n", "6", "--t", "25", "--runs", "2", "--series",
                 "--out", str(out)]) == 0
    rows = _rows(out / "run_series.csv")
    assert rows[0] == list(SERIES_HEADER)
    assert len(rows) == 26  # header + one row per minute
    assert rows[1][0] == "1" and rows[-1][0] == "25"


def test_sweep_grid_and_sorting(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(
        [
            "sweep",
            "--n", "6",
            "--eta", "1,0,0.5",
            "--q", "2,1",
            "--d", "3",
            "--t", "20",
            "--runs", "2",
            "--out", str(out),
        ]
    )
    assert code == 0
    rows = _rows(out / "sweep_end_of_day.csv")
    assert len(rows) == 7
    keys = [(float(r[2]), float(r[1]), float(r[0])) for r in rows[1:]]
    assert keys == sorted(keys)  # (D, q, eta) ascending regardless of flag order


def test_preset_fig1_emits_series_and_trace(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["preset", "fig1", "--seed", "3", "--out", str(out)]) == 0
    for name in ("fig1_end_of_day.csv", "fig1_series.csv", "fig1_trace.csv",
                 "fig1_manifest.json"):
        assert (out / name).exists(), name
    trace_rows = _rows(out / "fig1_trace.csv")
    assert trace_rows[0] == list(TRACE_HEADER)
    assert len(trace_rows) == 1 + 2 * 481  # both traced agents, t = 0..480
    stereotypes = {row[2] for row in trace_rows[1:]}
    assert stereotypes == {"e", "i"}
    manifest = json.loads((out / "fig1_manifest.json").read_text())
    assert manifest["config"]["preset"] == "fig1"
    assert manifest["master_seed"] == 3


def test_preset_runs_override(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["preset", "fig5", "--runs", "2", "--out", str(out)]) == 0
    rows = _rows(out / "fig5_end_of_day.csv")
    assert len(rows) == 9  # 8 q values at eta = 0.5
    assert all(row[4] == "2" for row in rows[1:])


def test_config_file_layering(tmp_path, capsys):
    out = tmp_path / "out"
    config = tmp_path / "job.cfg"
    config.write_text(
        "# sweep job\n"
        "n = 8\n"
        "eta = 0.25\n"
        "runs = 2\n"
        "t = 20\n"
    )
    # Flag beats config: eta 0.75 wins; config supplies n, runs, t.
    assert main(["run", "--config", str(config), "--eta", "0.75",
                 "--out", str(out)]) == 0
    row = dict(zip(*_rows(out / "run_end_of_day.csv")))
    assert row["eta"] == "0.75"
    assert row["N"] == "8"
    assert row["runs"] == "2"


def test_config_file_errors(tmp_path, capsys):
    bad_key = tmp_path / "bad.cfg"
    bad_key.write_text("frobs = 3\n")
    assert main(["run", "--config", str(bad_key), "--out", str(tmp_path)]) == 2
    assert "bad.cfg:1: unknown config key 'frobs'" in capsys.readouterr().err

    bad_line = tmp_path / "line.cfg"
    bad_line.write_text("n = 5\nnot a pair\n")
    assert main(["run", "--config", str(bad_line), "--out", str(tmp_path)]) == 2
    assert "line.cfg:2" in capsys.readouterr().err

    bad_value = tmp_path / "value.cfg"
    bad_value.write_text("n = lots\n")
    assert main(["run", "--config", str(bad_value), "--out", str(tmp_path)]) == 2
    assert "bad value for n" in capsys.readouterr().err

    assert main(["run", "--config", str(tmp_path / "absent.cfg")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_config_key_must_apply_to_command(tmp_path, capsys):
    config = tmp_path / "p.cfg"
    config.write_text("eta = 0.5\n")
    assert main(["preset", "fig1", "--config", str(config),
                 "--out", str(tmp_path / "o")]) == 2
    assert "does not apply to the 'preset' command" in capsys.readouterr().err


def test_preset_runs_from_config_file(tmp_path, capsys):
    out = tmp_path / "out"
    config = tmp_path / "p.cfg"
    config.write_text("runs = 3\nseed = 0x2A\n")
    assert main(["preset", "fig5", "--config", str(config), "--out", str(out)]) == 0
    rows = _rows(out / "fig5_end_of_day.csv")
    assert all(row[4] == "3" for row in rows[1:])
    manifest = json.loads((out / "fig5_manifest.json").read_text())
    assert manifest["master_seed"] == 42


def test_output_path_collision_is_runtime_error(tmp_path, capsys):
    blocker = tmp_path / "blocked"
    blocker.write_text("not a directory")
    assert main(["run", "--n", "4", "--t", "10", "--runs", "1",
                 "--out", str(blocker)]) == 3
    assert "cannot write output" in capsys.readouterr().err


def test_backend_choice_is_validated(tmp_path):
    assert main(["run", "--backend", "fortran", "--out", str(tmp_path)]) == 2


def test_validate_subcommand(capsys):
    assert main(["validate", "--configs", "3", "--oracle-runs", "2000"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4
    assert "two-agent-oracle" in out


def test_bench_subcommand(capsys):
    assert main(["bench", "--runs", "2"]) == 0
    out = capsys.readouterr().out
    assert "ms/run" in out
    if "compiled" in out:
        assert "speedup over python" in out
    assert main(["bench", "--runs", "0"]) == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "officesim", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == f"officesim {__version__}"
