"""Shared fixtures: the heavy preset ensembles and the acceptance report.

The figure presets (1000 runs per grid point) dominate the suite's runtime,
so each is computed once per session and shared by every test that needs it.
The acceptance tests additionally register a one-line verdict per criterion;
those lines are printed in the terminal summary so the pass/fail state of
the whole gate is readable at a glance even on a green run.
"""

from __future__ import annotations

import time

import pytest

from officesim.sweep import preset, run_sweep

_criterion_lines: list[tuple[int, bool, str]] = []


@pytest.fixture
def criterion():
    """Record a criterion verdict, then assert it.

    Recording happens first so the summary line exists even when the
    assertion makes the test red.
    """

    def check(number: int, ok: bool, detail: str) -> None:
        _criterion_lines.append((number, ok, detail))
        assert ok, f"criterion {number}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_criterion_lines):
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {verdict}  {detail}")


@pytest.fixture(scope="session")
def fig2_result():
    return run_sweep(preset("fig2"), workers=1)


@pytest.fixture(scope="session")
def fig2_result_w8():
    return run_sweep(preset("fig2"), workers=8)


@pytest.fixture(scope="session")
def fig3_timed():
    t0 = time.perf_counter()
    result = run_sweep(preset("fig3"), workers=1)
    return result, time.perf_counter() - t0


@pytest.fixture(scope="session")
def fig4_result():
    return run_sweep(preset("fig4"), workers=1)


@pytest.fixture(scope="session")
def fig5_result():
    return run_sweep(preset("fig5"), workers=1)


@pytest.fixture(scope="session")
def long_talks_result():
    return run_sweep(preset("long_talks"), workers=1)
