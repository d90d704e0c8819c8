"""Exhaustive oracle for tiny instances.

With two agents and unit-length conversations, no conversation survives its
own minute, so a day is a Markov chain on (L_0, L_1) whose branch
probabilities are known in closed form:

* update order: each of the two permutations with probability 1/2;
* a free agent pairs up iff its coin succeeds (probability p from the
  instigation curve, taken after the -1) AND it draws at least one contact
  attempt (probability 1 - e^{-q}); the single peer is then forced, free,
  and obliged to accept, and the duration draw over {1} is a constant.

Enumerating the chain yields the exact distribution of the final
motivations and of the whole-day productivity sum, which Monte Carlo runs
of the real engine must reproduce within sampling error.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict

from .engine import instigation_probability, run_day_raw
from .params import ModelParams, Stereotype
from .rng import derive_run_seed, grid_point_key


def oracle_params() -> ModelParams:
    """The canonical enumerable configuration used by tests and `validate`.

    tau values keep both stereotype thresholds away from the degenerate
    threshold-equals-floor case: horizon/tau_e = 5, horizon/tau_i = 2.
    """
    return ModelParams(
        n_agents=2,
        n_extroverts=1,
        horizon=5,
        max_duration=1,
        contact_rate=2.0,
        tau_extrovert=1.0,
        tau_introvert=2.5,
    )


def enumerate_final_distribution(
    params: ModelParams,
) -> tuple[dict[tuple[int, int], float], dict[int, float]]:
    """Exact distributions of final (L_0, L_1) and of the total day sum of P.

    Requires n_agents=2 and max_duration=1 (see module docstring for why the
    state space then collapses to the motivation pair).
    """
    if params.n_agents != 2:
        raise ValueError("enumeration supports exactly two agents")
    if params.max_duration != 1:
        raise ValueError("enumeration requires unit-length conversations")
    pm1 = 1.0 - math.exp(-params.contact_rate)
    cap = params.motivation_cap
    assert cap is not None
    stereotypes = tuple(
        Stereotype.EXTROVERT if k < params.n_extroverts else Stereotype.INTROVERT
        for k in (0, 1)
    )

    states: dict[tuple[int, int, int], float] = {(1, 1, 0): 1.0}
    for _ in range(params.horizon):
        nxt: dict[tuple[int, int, int], float] = defaultdict(float)
        for (l0, l1, total), prob in states.items():
            motivations = (l0, l1)
            for first in (0, 1):
                second = 1 - first
                half = prob * 0.5
                l_first = max(motivations[first] - 1, 1)
                p_first = instigation_probability(stereotypes[first], l_first, params)
                form_by_first = p_first * pm1
                if form_by_first > 0.0:
                    # First agent pairs up; the second then updates as talking
                    # and both record zero productivity this minute.
                    l_second = min(motivations[second] + 1, cap)
                    pair = [0, 0]
                    pair[first] = l_first
                    pair[second] = l_second
                    nxt[(pair[0], pair[1], total)] += half * form_by_first
                remainder = half * (1.0 - form_by_first)
                if remainder > 0.0:
                    l_second = max(motivations[second] - 1, 1)
                    p_second = instigation_probability(
                        stereotypes[second], l_second, params
                    )
                    form_by_second = p_second * pm1
                    pair = [0, 0]
                    pair[first] = l_first
                    pair[second] = l_second
                    if form_by_second > 0.0:
                        # The second agent pulls the already-updated first
                        # back into a talk; both still record zero.
                        nxt[(pair[0], pair[1], total)] += remainder * form_by_second
                    stay_free = remainder * (1.0 - form_by_second)
                    if stay_free > 0.0:
                        gained = (l_first - 1) + (l_second - 1)
                        nxt[(pair[0], pair[1], total + gained)] += stay_free
        states = dict(nxt)

    joint: dict[tuple[int, int], float] = defaultdict(float)
    day_total: dict[int, float] = defaultdict(float)
    for (l0, l1, total), prob in states.items():
        joint[(l0, l1)] += prob
        day_total[total] += prob
    return dict(joint), dict(day_total)


def mc_final_tallies(
    params: ModelParams,
    n_runs: int,
    master_seed: int = 0,
    backend: str | None = None,
) -> tuple[Counter, Counter]:
    """Tally final (L_0, L_1) and day totals over n_runs engine runs."""
    key = grid_point_key(params)
    joint: Counter = Counter()
    day_total: Counter = Counter()
    for run_index in range(n_runs):
        seed = derive_run_seed(master_seed, key, run_index)
        raw = run_day_raw(params, seed, backend=backend)
        joint[(raw.l_final[0], raw.l_final[1])] += 1
        day_total[sum(raw.cum)] += 1
    return joint, day_total


def compare_distributions(
    exact: dict,
    observed: Counter,
    n_runs: int,
    label: str,
    rare_threshold: float = 1e-4,
) -> list[str]:
    """3-standard-error agreement check; returns human-readable violations.

    Outcomes rarer than ``rare_threshold`` are pooled into one bucket checked
    with a Poisson-style bound (lambda + 3 sqrt(lambda) + 3), since the
    normal approximation behind "3 standard errors" needs a double-digit
    expected count.
    """
    problems = []
    for outcome, count in observed.items():
        if outcome not in exact:
            problems.append(
                f"{label}: outcome {outcome} is impossible but observed {count} times"
            )
    rare_prob = 0.0
    rare_count = 0
    for outcome, prob in sorted(exact.items()):
        count = observed.get(outcome, 0)
        if prob < rare_threshold:
            rare_prob += prob
            rare_count += count
            continue
        se = math.sqrt(prob * (1.0 - prob) / n_runs)
        if abs(count / n_runs - prob) > 3.0 * se:
            problems.append(
                f"{label}: outcome {outcome}: exact {prob:.6g}, "
                f"observed {count / n_runs:.6g}, tolerance {3.0 * se:.3g}"
            )
    expected_rare = rare_prob * n_runs
    bound = expected_rare + 3.0 * math.sqrt(expected_rare) + 3.0
    if rare_count > bound:
        problems.append(
            f"{label}: pooled rare outcomes: expected about {expected_rare:.3g} "
            f"hits, observed {rare_count} (bound {bound:.3g})"
        )
    return problems


def check_oracle(
    n_runs: int = 100_000,
    master_seed: int = 2,
    backend: str | None = None,
) -> list[str]:
    """Full oracle run: enumerate, simulate, compare. Empty list means pass."""
    params = oracle_params()
    exact_joint, exact_total = enumerate_final_distribution(params)
    mc_joint, mc_total = mc_final_tallies(params, n_runs, master_seed, backend)
    problems = compare_distributions(exact_joint, mc_joint, n_runs, "final (L_0, L_1)")
    problems += compare_distributions(exact_total, mc_total, n_runs, "day total P")
    return problems
