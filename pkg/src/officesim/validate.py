"""Bundled self-checks: RNG anchors, exact limits, invariants, the oracle.

The `validate` CLI subcommand and the test suite both run these, so CI and
users exercise identical checks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import available_backends, instigation_probability, run_day, simulate_reference
from .metrics import RunRecord, build_run_record
from .oracle import check_oracle
from .params import ModelParams, Stereotype
from .rng import Pcg32, derive_run_seed, grid_point_key

# First six outputs of the reference PCG32 demo seeded with (42, 54).
PCG32_GOLDEN_42_54 = (
    0xA15C02B7,
    0x7B47F409,
    0xBA1D3330,
    0x83D2F293,
    0xBFA4784B,
    0xCBED606E,
)

_Q_CHOICES = (0.0, 0.1, 0.5, 2.0, 5.0, 9.5, 12.0, 1000.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _result(name: str, problems: list[str], ok_detail: str) -> CheckResult:
    if problems:
        shown = "; ".join(problems[:5])
        if len(problems) > 5:
            shown += f" (+{len(problems) - 5} more)"
        return CheckResult(name, False, shown)
    return CheckResult(name, True, ok_detail)


def check_rng_anchors() -> CheckResult:
    problems = []
    rng = Pcg32(42, 54)
    got = tuple(rng.next_u32() for _ in range(6))
    if got != PCG32_GOLDEN_42_54:
        problems.append(
            f"PCG32(42, 54) produced {[hex(v) for v in got]}, "
            f"expected {[hex(v) for v in PCG32_GOLDEN_42_54]}"
        )
    a = Pcg32(9, 9)
    b = Pcg32(9, 9)
    if a.poisson(0.0) != 0:
        problems.append("poisson(0) != 0")
    if a.uniform_int(5, 5) != 5:
        problems.append("uniform_int(5, 5) != 5")
    if a.next_u32() != b.next_u32():
        problems.append("degenerate draws consumed randomness")
    seen = set()
    for run_index in range(10_000):
        seed = derive_run_seed(1, 2, run_index)
        seen.add((seed.state, seed.seq))
    if len(seen) != 10_000:
        problems.append(f"seed derivation collided: {10_000 - len(seen)} duplicates")
    return _result("rng-anchors", problems, "golden vector, degenerate draws, derivation scan")


def check_null_interaction() -> CheckResult:
    """q=0 must give exactly zero productivity and motivation pinned at 1."""
    problems = []
    for n, ne in ((1, 0), (2, 1), (5, 2), (5, 5)):
        params = ModelParams(
            n_agents=n, n_extroverts=ne, horizon=50, contact_rate=0.0
        )
        seed = derive_run_seed(11, grid_point_key(params), 0)
        for backend in available_backends():
            rec = run_day(params, seed, backend=backend)
            if rec.end.pi_w != 0.0 or rec.end.lam_w != 1.0:
                problems.append(
                    f"N={n} Ne={ne} {backend}: pi_w={rec.end.pi_w} lam_w={rec.end.lam_w}"
                )
            if any(c != 0 for c in rec.cumulative_sums):
                problems.append(f"N={n} Ne={ne} {backend}: nonzero cumulative sums")
        raw = simulate_reference(params, seed)
        if any(v != 1 for v in raw.l_final) or any(c != 0 for c in raw.cum):
            problems.append(f"N={n} Ne={ne} reference layer: interaction at q=0")
    return _result("null-interaction", problems, "N in {1,2,5} across backends")


def random_config(rng: Pcg32) -> ModelParams:
    """A small random configuration with both thresholds at or above 1.

    tau values are kept <= horizon so the instigation curve's endpoint
    properties (1 at the floor, 0 above the threshold) are well defined.
    """
    n = rng.uniform_int(1, 20)
    ne = rng.uniform_int(0, n)
    horizon = rng.uniform_int(1, 100)
    dmax = rng.uniform_int(1, 25)
    q = _Q_CHOICES[rng.uniform_int(0, len(_Q_CHOICES) - 1)]
    tau_hi = min(3.0, float(horizon))
    tau_e = 0.5 + (tau_hi - 0.5) * rng.next_double()
    tau_i = tau_e + (horizon - tau_e) * rng.next_double()
    cap = None if rng.uniform_int(0, 3) else rng.uniform_int(1, horizon + 10)
    return ModelParams(
        n_agents=n,
        n_extroverts=ne,
        horizon=horizon,
        max_duration=dmax,
        contact_rate=q,
        tau_extrovert=tau_e,
        tau_introvert=tau_i,
        motivation_cap=cap,
    )


def world_problems(world, params: ModelParams) -> list[str]:
    """Structural invariants at the recording point of a step."""
    problems = []
    busy = set()
    for conv in world.conversations:
        a, b = conv.participants
        if a == b:
            problems.append(f"self-conversation at agent {a}")
        for who in (a, b):
            if who in busy:
                problems.append(f"agent {who} in two conversations")
            busy.add(who)
        if world.agents[a].partner != b or world.agents[b].partner != a:
            problems.append(f"partner pointers inconsistent for pair ({a},{b})")
        if conv.remaining < 1:
            problems.append(f"pair ({a},{b}) remaining {conv.remaining} < 1")
    cap = params.motivation_cap
    for k, agent in enumerate(world.agents):
        if not 1 <= agent.motivation <= cap:
            problems.append(f"agent {k} motivation {agent.motivation} outside [1,{cap}]")
        if (agent.partner is not None) != (k in busy):
            problems.append(f"agent {k} status disagrees with conversation set")
        expected = 0 if agent.partner is not None else agent.motivation - 1
        if world.productivity_now[k] != expected:
            problems.append(
                f"agent {k} productivity {world.productivity_now[k]} != {expected}"
            )
    if world.n_free != params.n_agents - len(busy):
        problems.append("free-agent counter out of sync")
    return problems


def record_problems(rec: RunRecord) -> list[str]:
    """Weighted-mean identity and range checks over a full run's series."""
    problems = []
    p = rec.params
    n, ne, ni = p.n_agents, p.n_extroverts, p.n_introverts
    s = rec.series
    assert s is not None
    for t_index in range(len(s.pi_w)):
        pi_parts = 0.0
        if s.pi_e is not None:
            pi_parts += ne * s.pi_e[t_index]
        if s.pi_i is not None:
            pi_parts += ni * s.pi_i[t_index]
        expected = pi_parts / n
        tol = 1e-9 * max(1.0, abs(s.pi_w[t_index]))
        if abs(s.pi_w[t_index] - expected) > tol:
            problems.append(
                f"minute {t_index + 1}: pi_w {s.pi_w[t_index]!r} != weighted {expected!r}"
            )
        lam_parts = 0.0
        if s.lam_e is not None:
            lam_parts += ne * s.lam_e[t_index]
        if s.lam_i is not None:
            lam_parts += ni * s.lam_i[t_index]
        expected = lam_parts / n
        tol = 1e-9 * max(1.0, abs(s.lam_w[t_index]))
        if abs(s.lam_w[t_index] - expected) > tol:
            problems.append(
                f"minute {t_index + 1}: lam_w {s.lam_w[t_index]!r} != weighted {expected!r}"
            )
        if not 1.0 <= s.lam_w[t_index] <= p.motivation_cap:
            problems.append(f"minute {t_index + 1}: lam_w outside [1, cap]")
        if not 0.0 <= s.pi_w[t_index] <= p.motivation_cap - 1:
            problems.append(f"minute {t_index + 1}: pi_w outside [0, cap-1]")
    return problems


def instigation_curve_problems(params: ModelParams) -> list[str]:
    """Endpoint, monotonicity, and stereotype-ordering properties."""
    problems = []
    cap = params.motivation_cap
    scan_to = min(cap, 2000)
    for stereotype in (Stereotype.EXTROVERT, Stereotype.INTROVERT):
        ratio = params.horizon / params.tau(stereotype)
        prev = None
        for motivation in range(1, scan_to + 1):
            prob = instigation_probability(stereotype, motivation, params)
            if not 0.0 <= prob <= 1.0:
                problems.append(f"{stereotype.name} L={motivation}: p={prob} outside [0,1]")
            if motivation == 1 and ratio >= 1.0 and prob != 1.0:
                problems.append(f"{stereotype.name}: p(1)={prob} != 1")
            if motivation > ratio and prob != 0.0:
                problems.append(f"{stereotype.name} L={motivation}: p={prob} above threshold")
            if prev is not None and prob > prev:
                problems.append(f"{stereotype.name} L={motivation}: p increased")
            prev = prob
    for motivation in range(1, scan_to + 1):
        pe = instigation_probability(Stereotype.EXTROVERT, motivation, params)
        pi = instigation_probability(Stereotype.INTROVERT, motivation, params)
        if pe < pi:
            problems.append(f"L={motivation}: extrovert p {pe} < introvert p {pi}")
    return problems


def check_invariants(n_configs: int = 100, master_seed: int = 7) -> CheckResult:
    rng = Pcg32(master_seed, 0x1E5)
    problems: list[str] = []
    for index in range(n_configs):
        params = random_config(rng)
        seed = derive_run_seed(master_seed, grid_point_key(params), index)
        step_problems: list[str] = []

        def on_record(world, _params=params, _sink=step_problems):
            _sink.extend(world_problems(world, _params))

        raw = simulate_reference(params, seed, want_series=True, on_record=on_record)
        for text in step_problems[:3]:
            problems.append(f"config {index}: {text}")
        rec = build_run_record(raw)
        for text in record_problems(rec)[:3]:
            problems.append(f"config {index}: {text}")
        for text in instigation_curve_problems(params)[:3]:
            problems.append(f"config {index}: {text}")
    return _result("invariants", problems, f"{n_configs} randomized configurations")


def check_small_oracle(
    n_runs: int = 100_000, master_seed: int = 2, backend: str | None = None
) -> CheckResult:
    problems = check_oracle(n_runs=n_runs, master_seed=master_seed, backend=backend)
    return _result(
        "two-agent-oracle", problems, f"enumeration vs {n_runs} Monte Carlo runs"
    )


def run_all(
    invariant_configs: int = 100,
    oracle_runs: int = 100_000,
    backend: str | None = None,
) -> list[CheckResult]:
    return [
        check_rng_anchors(),
        check_null_interaction(),
        check_invariants(n_configs=invariant_configs),
        check_small_oracle(n_runs=oracle_runs, backend=backend),
    ]
