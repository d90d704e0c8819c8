"""Observables of a simulated day and their ensemble statistics.

The engine cores hand back integers only (cumulative productivity counts,
per-minute subgroup sums).  Everything floating-point happens here, in one
place, so the compiled and interpreted cores never have to agree on float
arithmetic -- only on integer event histories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .params import ModelParams, Stereotype


@dataclass(frozen=True)
class RawRun:
    """Integer event history of one simulated day.

    ``cum[k]`` is the whole-day productivity sum of agent k.  ``l_final[k]``
    is its motivation after the last step.  The per-minute arrays are indexed
    by t = 0..T and only present when the run was asked to retain them;
    index 0 holds the initial state (all sums of P are 0, all L are 1).
    """

    params: ModelParams
    cum: list[int]
    l_final: list[int]
    sp_e: list[int] | None = None
    sp_i: list[int] | None = None
    sl_e: list[int] | None = None
    sl_i: list[int] | None = None
    trace_ids: tuple[int, int] | None = None
    trace_l: tuple[list[int], list[int]] | None = None
    trace_cum: tuple[list[int], list[int]] | None = None


@dataclass(frozen=True)
class EndOfDay:
    """The six end-of-day observables; subgroup fields are None when empty."""

    pi_e: float | None
    pi_i: float | None
    pi_w: float
    lam_e: float | None
    lam_i: float | None
    lam_w: float

    def as_tuple(self) -> tuple[float | None, ...]:
        return (self.pi_e, self.pi_i, self.pi_w, self.lam_e, self.lam_i, self.lam_w)


@dataclass(frozen=True)
class SeriesBlock:
    """Per-minute subgroup means, index 0 corresponding to t = 1."""

    pi_e: list[float] | None
    pi_i: list[float] | None
    pi_w: list[float]
    lam_e: list[float] | None
    lam_i: list[float] | None
    lam_w: list[float]


@dataclass(frozen=True)
class AgentTrace:
    agent_id: int
    stereotype: Stereotype
    motivation: list[int]
    pi: list[float]


@dataclass(frozen=True)
class TraceBlock:
    extrovert: AgentTrace
    introvert: AgentTrace


@dataclass(frozen=True)
class RunRecord:
    params: ModelParams
    end: EndOfDay
    cumulative_sums: list[int]
    series: SeriesBlock | None = None
    trace: TraceBlock | None = None


@dataclass(frozen=True)
class EnsembleStats:
    n_runs: int
    mean_end: EndOfDay
    stderr_end: EndOfDay
    mean_series: SeriesBlock | None = None

    @property
    def stderr_caveat(self) -> str | None:
        if self.n_runs == 1:
            return "single run: standard errors are 0 by construction"
        return None


def _subgroup_pi(cum: Sequence[int], lo: int, hi: int, horizon: int) -> float | None:
    if hi == lo:
        return None
    total = sum(cum[lo:hi])
    return total / ((hi - lo) * horizon)


def _subgroup_mean_int(values: Sequence[int], lo: int, hi: int) -> float | None:
    if hi == lo:
        return None
    return sum(values[lo:hi]) / (hi - lo)


def end_of_day(raw: RawRun) -> EndOfDay:
    p = raw.params
    n, ne, horizon = p.n_agents, p.n_extroverts, p.horizon
    return EndOfDay(
        pi_e=_subgroup_pi(raw.cum, 0, ne, horizon),
        pi_i=_subgroup_pi(raw.cum, ne, n, horizon),
        pi_w=sum(raw.cum) / (n * horizon),
        lam_e=_subgroup_mean_int(raw.l_final, 0, ne),
        lam_i=_subgroup_mean_int(raw.l_final, ne, n),
        lam_w=sum(raw.l_final) / n,
    )


def _series_from_sums(raw: RawRun) -> SeriesBlock:
    p = raw.params
    ne, ni, n = p.n_extroverts, p.n_introverts, p.n_agents
    horizon = p.horizon
    assert raw.sp_e is not None and raw.sp_i is not None
    assert raw.sl_e is not None and raw.sl_i is not None
    pi_e: list[float] | None = [] if ne else None
    pi_i: list[float] | None = [] if ni else None
    pi_w: list[float] = []
    lam_e: list[float] | None = [] if ne else None
    lam_i: list[float] | None = [] if ni else None
    lam_w: list[float] = []
    run_e = 0
    run_i = 0
    for t in range(1, horizon + 1):
        run_e += raw.sp_e[t]
        run_i += raw.sp_i[t]
        if pi_e is not None:
            pi_e.append(run_e / (ne * t))
        if pi_i is not None:
            pi_i.append(run_i / (ni * t))
        pi_w.append((run_e + run_i) / (n * t))
        if lam_e is not None:
            lam_e.append(raw.sl_e[t] / ne)
        if lam_i is not None:
            lam_i.append(raw.sl_i[t] / ni)
        lam_w.append((raw.sl_e[t] + raw.sl_i[t]) / n)
    return SeriesBlock(pi_e, pi_i, pi_w, lam_e, lam_i, lam_w)


def _trace_from_raw(raw: RawRun) -> TraceBlock:
    assert raw.trace_ids is not None
    assert raw.trace_l is not None and raw.trace_cum is not None
    p = raw.params
    traces = []
    for which in (0, 1):
        agent_id = raw.trace_ids[which]
        cum = raw.trace_cum[which]
        pi = [0.0]
        for t in range(1, p.horizon + 1):
            pi.append(cum[t] / t)
        stereotype = (
            Stereotype.EXTROVERT if agent_id < p.n_extroverts else Stereotype.INTROVERT
        )
        traces.append(AgentTrace(agent_id, stereotype, list(raw.trace_l[which]), pi))
    return TraceBlock(extrovert=traces[0], introvert=traces[1])


def build_run_record(raw: RawRun) -> RunRecord:
    return RunRecord(
        params=raw.params,
        end=end_of_day(raw),
        cumulative_sums=list(raw.cum),
        series=_series_from_sums(raw) if raw.sp_e is not None else None,
        trace=_trace_from_raw(raw) if raw.trace_ids is not None else None,
    )


def mean_stderr(values: Sequence[float]) -> tuple[float, float]:
    """Ensemble mean and standard error of the mean (unbiased stddev / sqrt R).

    Sums use ``math.fsum``, which is exact, so any permutation of ``values``
    yields bit-identical results.
    """
    r = len(values)
    if r == 0:
        raise ValueError("cannot aggregate an empty collection")
    mean = math.fsum(values) / r
    if r == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (r - 1)
    return mean, math.sqrt(var / r)


def _column(records: Sequence[RunRecord], index: int) -> tuple[float | None, float | None]:
    values = [rec.end.as_tuple()[index] for rec in records]
    if values[0] is None:
        return None, None
    return mean_stderr(values)  # type: ignore[arg-type]


def _mean_series(records: Sequence[RunRecord]) -> SeriesBlock | None:
    if any(rec.series is None for rec in records):
        return None
    r = len(records)

    def fold(column: str) -> list[float] | None:
        first = getattr(records[0].series, column)
        if first is None:
            return None
        length = len(first)
        return [
            math.fsum(getattr(rec.series, column)[t] for rec in records) / r
            for t in range(length)
        ]

    return SeriesBlock(
        pi_e=fold("pi_e"),
        pi_i=fold("pi_i"),
        pi_w=fold("pi_w"),
        lam_e=fold("lam_e"),
        lam_i=fold("lam_i"),
        lam_w=fold("lam_w"),
    )


def aggregate(records: Sequence[RunRecord]) -> EnsembleStats:
    """Fold an ensemble of runs into means and standard errors.

    Rejects mixed-parameter collections: averaging across different settings
    is always a bug upstream.
    """
    if not records:
        raise ValueError("cannot aggregate an empty collection")
    first = records[0].params
    for rec in records[1:]:
        if rec.params != first:
            raise ValueError(
                f"mixed-parameter aggregation: {rec.params} differs from {first}"
            )
    means: list[float | None] = []
    errs: list[float | None] = []
    for i in range(6):
        m, s = _column(records, i)
        means.append(m)
        errs.append(s)
    return EnsembleStats(
        n_runs=len(records),
        mean_end=EndOfDay(*means),
        stderr_end=EndOfDay(*errs),
        mean_series=_mean_series(records),
    )
