"""The two-agent exhaustive oracle and its comparison machinery."""

from __future__ import annotations

from collections import Counter

import pytest

from officesim.oracle import (
    check_oracle,
    compare_distributions,
    enumerate_final_distribution,
    mc_final_tallies,
    oracle_params,
)
from officesim.params import ModelParams


def test_oracle_params_are_enumerable():
    params = oracle_params()
    assert params.n_agents == 2
    assert params.max_duration == 1
    assert params.horizon / params.tau_extrovert == 5.0
    assert params.horizon / params.tau_introvert == 2.0


def test_enumeration_is_a_probability_distribution():
    joint, day_total = enumerate_final_distribution(oracle_params())
    assert sum(joint.values()) == pytest.approx(1.0, abs=1e-12)
    assert sum(day_total.values()) == pytest.approx(1.0, abs=1e-12)
    assert all(p >= 0.0 for p in joint.values())
    # Motivations live in [1, horizon] after a 5-minute day.
    for l0, l1 in joint:
        assert 1 <= l0 <= 5 and 1 <= l1 <= 5
    # The null path (never talk) exists: both pinned at the floor, the day
    # total is then 0 productivity only if conversations happened... the
    # all-free path accumulates (L-1)=0 each minute, so total 0 has mass.
    assert day_total.get(0, 0.0) > 0.0


def test_enumeration_rejects_non_enumerable_shapes():
    with pytest.raises(ValueError, match="two agents"):
        enumerate_final_distribution(
            ModelParams(n_agents=3, n_extroverts=1, horizon=5, max_duration=1)
        )
    with pytest.raises(ValueError, match="unit-length"):
        enumerate_final_distribution(
            ModelParams(n_agents=2, n_extroverts=1, horizon=5, max_duration=2)
        )


def test_mc_tallies_shape():
    joint, day_total = mc_final_tallies(oracle_params(), n_runs=500, master_seed=4)
    assert sum(joint.values()) == 500
    assert sum(day_total.values()) == 500


def test_compare_distributions_flags_impossible_outcomes():
    exact = {(1, 1): 1.0}
    observed = Counter({(1, 1): 99, (9, 9): 1})
    problems = compare_distributions(exact, observed, 100, "unit")
    assert any("impossible" in p for p in problems)


def test_compare_distributions_flags_large_deviations():
    exact = {0: 0.5, 1: 0.5}
    observed = Counter({0: 90, 1: 10})
    problems = compare_distributions(exact, observed, 100, "unit")
    assert problems  # 40 points off at se = 0.05 is far outside 3 se


def test_compare_distributions_accepts_exact_agreement():
    exact = {0: 0.25, 1: 0.75}
    observed = Counter({0: 2_500, 1: 7_500})
    assert compare_distributions(exact, observed, 10_000, "unit") == []


def test_rare_bucket_uses_poisson_bound():
    # One outcome with tiny probability: a couple of hits are fine, a pile
    # of them is not.
    exact = {0: 0.99995, 1: 0.00005}
    fine = Counter({0: 99_993, 1: 7})  # bound is 5 + 3 sqrt 5 + 3 = 14.7
    assert compare_distributions(exact, fine, 100_000, "unit") == []
    bad = Counter({0: 99_950, 1: 50})
    assert any("rare" in p for p in compare_distributions(exact, bad, 100_000, "unit"))


@pytest.mark.parametrize("backend", [None, "python"])
def test_oracle_agrees_with_the_engine(backend):
    # A lighter pass than the acceptance gate's 10^5-run check; the tiny
    # instance makes even the pure-Python core cheap.
    assert check_oracle(n_runs=20_000, master_seed=2, backend=backend) == []
