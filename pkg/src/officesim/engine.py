"""Discrete-time engine for the office interaction model.

One run is a workday of ``horizon`` minutes over ``n_agents`` workers, the
first ``n_extroverts`` of them extroverted.  Every minute the agents update
in a fresh random order: a talking agent gains one unit of motivation, a
free agent loses one (floored at 1) and then may try to start a conversation
with a uniformly chosen peer.  Productivity of a free agent is its motivation
minus one; a talking agent produces nothing that minute.

Two interchangeable cores execute the day:

* an object layer (``init_world`` .. ``advance_step``) written for clarity,
  used by tests and invariant checks;
* ``_simulate_py``, a flat-array core that the compiled kernel in
  ``_kernel.pyx`` mirrors bit for bit.

All three consume the random stream in the same documented order
(permutation, per-free-agent coin, attempt count, peers, duration), so their
outputs are interchangeable down to the last bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .metrics import RawRun, RunRecord, build_run_record
from .params import ModelParams, ParamError, Stereotype
from .rng import Pcg32, RunSeed

try:
    from . import _kernel
except ImportError:
    _kernel = None


@dataclass
class AgentState:
    stereotype: Stereotype
    motivation: int
    partner: int | None = None

    @property
    def talking(self) -> bool:
        return self.partner is not None


@dataclass
class Conversation:
    participants: tuple[int, int]
    remaining: int


@dataclass
class WorldState:
    time: int
    agents: list[AgentState]
    conversations: list[Conversation] = field(default_factory=list)
    productivity_now: list[int] = field(default_factory=list)
    n_free: int = 0


def init_world(params: ModelParams) -> WorldState:
    agents = [
        AgentState(
            stereotype=(
                Stereotype.EXTROVERT if k < params.n_extroverts else Stereotype.INTROVERT
            ),
            motivation=1,
        )
        for k in range(params.n_agents)
    ]
    return WorldState(
        time=0,
        agents=agents,
        productivity_now=[0] * params.n_agents,
        n_free=params.n_agents,
    )


def instigation_probability(
    stereotype: Stereotype, motivation: int, params: ModelParams
) -> float:
    """Chance that a free agent at this motivation tries to start a talk.

    Linear from 1 at motivation 1 down to 0 at the stereotype threshold
    horizon/tau, and 0 above it.
    """
    ratio = params.horizon / params.tau(stereotype)
    lf = float(motivation)
    if lf > ratio:
        return 0.0
    if ratio == 1.0:
        # Threshold equal to the motivation floor: the linear form degenerates
        # to 0/0 and the only motivation at or below it is 1, which instigates
        # with certainty.
        return 1.0
    p = (ratio - lf) / (ratio - 1.0)
    if p < 0.0:
        return 0.0
    if p > 1.0:
        return 1.0
    return p


def attempt_engagement(
    instigator: int, world: WorldState, rng: Pcg32, params: ModelParams
) -> Conversation | None:
    """Roll Poisson-many contact attempts; pair up with the first free peer.

    Peers are drawn uniformly among the other agents, independently per
    attempt.  An approached free agent always accepts.
    """
    m = rng.poisson(params.contact_rate)
    n = params.n_agents
    if n == 1:
        return None
    for _ in range(m):
        j = rng.uniform_int(0, n - 2)
        peer = j if j < instigator else j + 1
        if world.agents[peer].partner is None:
            duration = rng.uniform_int(1, params.max_duration)
            conv = Conversation(
                participants=(min(instigator, peer), max(instigator, peer)),
                remaining=duration,
            )
            world.agents[instigator].partner = peer
            world.agents[peer].partner = instigator
            world.conversations.append(conv)
            world.n_free -= 2
            return conv
    return None


def update_agent(
    agent_id: int, world: WorldState, rng: Pcg32, params: ModelParams
) -> None:
    """One agent's minute: +1 motivation while talking, else -1 and maybe talk.

    The instigation test uses the already-decremented motivation.  The coin is
    drawn for every free agent even when nobody is available to answer; only
    the contact draws themselves are skipped then (the outcome is forced), so
    the draw sequence stays aligned across all cores.
    """
    agent = world.agents[agent_id]
    if agent.partner is not None:
        agent.motivation = min(agent.motivation + 1, params.motivation_cap)
        return
    agent.motivation = max(agent.motivation - 1, 1)
    p = instigation_probability(agent.stereotype, agent.motivation, params)
    u = rng.next_double()
    if u < p and world.n_free > 1:
        attempt_engagement(agent_id, world, rng, params)


def advance_step(
    world: WorldState, rng: Pcg32, params: ModelParams, on_record=None
) -> None:
    """One simulated minute.

    Order: random update permutation, per-agent updates, productivity
    recording, then the conversation countdown (a talk formed this minute
    with duration 1 ends this minute).  ``on_record`` fires at the recording
    point, before the countdown mutates conversation status.
    """
    order = list(range(params.n_agents))
    rng.shuffle(order)
    for agent_id in order:
        update_agent(agent_id, world, rng, params)
    for agent_id, agent in enumerate(world.agents):
        world.productivity_now[agent_id] = (
            0 if agent.partner is not None else agent.motivation - 1
        )
    if on_record is not None:
        on_record(world)
    kept = []
    for conv in world.conversations:
        conv.remaining -= 1
        if conv.remaining == 0:
            a, b = conv.participants
            world.agents[a].partner = None
            world.agents[b].partner = None
            world.n_free += 2
        else:
            kept.append(conv)
    world.conversations = kept
    world.time += 1


def simulate_reference(
    params: ModelParams,
    seed: RunSeed,
    want_series: bool = False,
    trace_ids: tuple[int, int] | None = None,
    on_record=None,
) -> RawRun:
    """Run a day on the object layer, producing the same RawRun as the cores.

    Slow but transparent; the parity tests pin the fast cores against it.
    """
    n, ne = params.n_agents, params.n_extroverts
    horizon = params.horizon
    world = init_world(params)
    rng = Pcg32.from_run_seed(seed)
    cum = [0] * n
    sp_e = [0] * (horizon + 1) if want_series else None
    sp_i = [0] * (horizon + 1) if want_series else None
    sl_e = [0] * (horizon + 1) if want_series else None
    sl_i = [0] * (horizon + 1) if want_series else None
    if want_series:
        sl_e[0] = ne
        sl_i[0] = n - ne
    if trace_ids is not None:
        tl = ([1] * (horizon + 1), [1] * (horizon + 1))
        tc = ([0] * (horizon + 1), [0] * (horizon + 1))
    else:
        tl = tc = None
    for _ in range(horizon):
        advance_step(world, rng, params, on_record=on_record)
        t = world.time
        for k in range(n):
            cum[k] += world.productivity_now[k]
        if want_series:
            sp_e[t] = sum(world.productivity_now[:ne])
            sp_i[t] = sum(world.productivity_now[ne:])
            sl_e[t] = sum(a.motivation for a in world.agents[:ne])
            sl_i[t] = sum(a.motivation for a in world.agents[ne:])
        if trace_ids is not None:
            for which in (0, 1):
                tl[which][t] = world.agents[trace_ids[which]].motivation
                tc[which][t] = cum[trace_ids[which]]
    return RawRun(
        params=params,
        cum=cum,
        l_final=[a.motivation for a in world.agents],
        sp_e=sp_e,
        sp_i=sp_i,
        sl_e=sl_e,
        sl_i=sl_i,
        trace_ids=trace_ids,
        trace_l=tl,
        trace_cum=tc,
    )


def _simulate_py(
    n: int,
    ne: int,
    horizon: int,
    dmax: int,
    q: float,
    tau_e: float,
    tau_i: float,
    cap: int,
    state: int,
    seq: int,
    want_series: int,
    trace_e: int,
    trace_i: int,
):
    """Flat-array day loop; the fallback when the compiled kernel is absent.

    NOTE: ``_kernel.pyx`` transcribes this function line by line.  Any change
    here must be mirrored there, keeping expression order intact.
    """
    rng = Pcg32(state, seq)
    next_double = rng.next_double
    uniform_int = rng.uniform_int
    poisson = rng.poisson

    motivation = [1] * n
    partner = [-1] * n
    rem = [0] * n
    order = list(range(n))
    cum = [0] * n
    n_free = n

    ratio_e = horizon / tau_e
    ratio_i = horizon / tau_i
    denom_e = ratio_e - 1.0
    denom_i = ratio_i - 1.0

    if want_series:
        sp_e = [0] * (horizon + 1)
        sp_i = [0] * (horizon + 1)
        sl_e = [0] * (horizon + 1)
        sl_i = [0] * (horizon + 1)
        sl_e[0] = ne
        sl_i[0] = n - ne
    else:
        sp_e = sp_i = sl_e = sl_i = None
    want_trace = trace_e >= 0
    if want_trace:
        tl_e = [1] * (horizon + 1)
        tl_i = [1] * (horizon + 1)
        tc_e = [0] * (horizon + 1)
        tc_i = [0] * (horizon + 1)
    else:
        tl_e = tl_i = tc_e = tc_i = None

    for t in range(1, horizon + 1):
        for i in range(n):
            order[i] = i
        for i in range(n - 1, 0, -1):
            j = uniform_int(0, i)
            order[i], order[j] = order[j], order[i]
        for idx in range(n):
            k = order[idx]
            if partner[k] >= 0:
                if motivation[k] < cap:
                    motivation[k] += 1
                continue
            lk = motivation[k]
            if lk > 1:
                lk -= 1
                motivation[k] = lk
            if k < ne:
                ratio = ratio_e
                denom = denom_e
            else:
                ratio = ratio_i
                denom = denom_i
            lf = float(lk)
            if lf > ratio:
                p = 0.0
            elif ratio == 1.0:
                p = 1.0
            else:
                p = (ratio - lf) / denom
            u = next_double()
            if u < p and n_free > 1:
                m = poisson(q)
                for _ in range(m):
                    j = uniform_int(0, n - 2)
                    peer = j if j < k else j + 1
                    if partner[peer] < 0:
                        d = uniform_int(1, dmax)
                        partner[k] = peer
                        partner[peer] = k
                        if k < peer:
                            rem[k] = d
                        else:
                            rem[peer] = d
                        n_free -= 2
                        break
        if want_series:
            spe = 0
            spi = 0
            sle = 0
            sli = 0
            for k in range(n):
                lk = motivation[k]
                pk = 0 if partner[k] >= 0 else lk - 1
                cum[k] += pk
                if k < ne:
                    spe += pk
                    sle += lk
                else:
                    spi += pk
                    sli += lk
            sp_e[t] = spe
            sp_i[t] = spi
            sl_e[t] = sle
            sl_i[t] = sli
        else:
            for k in range(n):
                if partner[k] < 0:
                    cum[k] += motivation[k] - 1
        if want_trace:
            tl_e[t] = motivation[trace_e]
            tc_e[t] = cum[trace_e]
            tl_i[t] = motivation[trace_i]
            tc_i[t] = cum[trace_i]
        for k in range(n):
            mate = partner[k]
            if mate > k:
                r = rem[k] - 1
                rem[k] = r
                if r == 0:
                    partner[k] = -1
                    partner[mate] = -1
                    n_free += 2

    return (cum, motivation, sp_e, sp_i, sl_e, sl_i, tl_e, tl_i, tc_e, tc_i)


_CORES = {"python": _simulate_py}
if _kernel is not None:
    _CORES["compiled"] = _kernel.simulate_day


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_CORES))


def default_backend() -> str:
    return "compiled" if "compiled" in _CORES else "python"


def _select_core(backend: str | None):
    name = backend if backend is not None else default_backend()
    try:
        return _CORES[name]
    except KeyError:
        raise ValueError(
            f"unknown backend {name!r}; available: {', '.join(sorted(_CORES))}"
        ) from None


def _check_trace_ids(params: ModelParams, trace_ids: tuple[int, int]) -> None:
    te, ti = trace_ids
    if not 0 <= te < params.n_extroverts:
        raise ParamError(f"trace extrovert id {te} outside [0, {params.n_extroverts})")
    if not params.n_extroverts <= ti < params.n_agents:
        raise ParamError(
            f"trace introvert id {ti} outside [{params.n_extroverts}, {params.n_agents})"
        )


def run_day_raw(
    params: ModelParams,
    seed: RunSeed,
    *,
    want_series: bool = False,
    trace_ids: tuple[int, int] | None = None,
    backend: str | None = None,
) -> RawRun:
    """Execute one day on the selected core and return the integer history."""
    if trace_ids is not None:
        _check_trace_ids(params, trace_ids)
    core = _select_core(backend)
    trace_e, trace_i = trace_ids if trace_ids is not None else (-1, -1)
    cum, l_final, sp_e, sp_i, sl_e, sl_i, tl_e, tl_i, tc_e, tc_i = core(
        params.n_agents,
        params.n_extroverts,
        params.horizon,
        params.max_duration,
        params.contact_rate,
        params.tau_extrovert,
        params.tau_introvert,
        params.motivation_cap,
        seed.state,
        seed.seq,
        1 if want_series else 0,
        trace_e,
        trace_i,
    )
    return RawRun(
        params=params,
        cum=cum,
        l_final=l_final,
        sp_e=sp_e,
        sp_i=sp_i,
        sl_e=sl_e,
        sl_i=sl_i,
        trace_ids=trace_ids,
        trace_l=(tl_e, tl_i) if trace_ids is not None else None,
        trace_cum=(tc_e, tc_i) if trace_ids is not None else None,
    )


def run_day(
    params: ModelParams,
    seed: RunSeed,
    *,
    want_series: bool = False,
    trace_ids: tuple[int, int] | None = None,
    backend: str | None = None,
) -> RunRecord:
    """One fully deterministic simulated day: (params, seed) -> observables."""
    raw = run_day_raw(
        params,
        seed,
        want_series=want_series,
        trace_ids=trace_ids,
        backend=backend,
    )
    return build_run_record(raw)
