"""Generator unit tests: golden anchors, derivation, and distributions."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from officesim.params import ModelParams
from officesim.rng import (
    Pcg32,
    derive_run_seed,
    grid_point_key,
    log_factorial,
    mix64,
)
from stat_checks import (
    poisson_moment_problems,
    shuffle_frequency_problems,
    uniform_frequency_problems,
)

# First six outputs of the canonical PCG32 demo program seeded with
# (initstate=42, initseq=54).
GOLDEN_42_54 = (
    0xA15C02B7,
    0x7B47F409,
    0xBA1D3330,
    0x83D2F293,
    0xBFA4784B,
    0xCBED606E,
)


def test_pcg32_golden_vector():
    rng = Pcg32(42, 54)
    assert tuple(rng.next_u32() for _ in range(6)) == GOLDEN_42_54


def test_pcg32_streams_are_reproducible_and_distinct():
    a = Pcg32(123, 7)
    b = Pcg32(123, 7)
    c = Pcg32(123, 8)
    first = [a.next_u32() for _ in range(50)]
    assert first == [b.next_u32() for _ in range(50)]
    assert first != [c.next_u32() for _ in range(50)]


def test_next_double_range():
    rng = Pcg32(5, 5)
    xs = [rng.next_double() for _ in range(10_000)]
    assert all(0.0 <= x < 1.0 for x in xs)
    # 53-bit resolution: values are not quantized to the 32-bit grid.
    assert any(x * 4294967296.0 % 1.0 != 0.0 for x in xs)


def test_uniform_int_bounds_and_degenerate_range():
    rng = Pcg32(1, 1)
    xs = [rng.uniform_int(3, 9) for _ in range(5_000)]
    assert min(xs) == 3 and max(xs) == 9
    # A single-point range consumes no randomness: the next draw matches a
    # fresh generator that never saw the degenerate call.
    a = Pcg32(77, 3)
    b = Pcg32(77, 3)
    assert a.uniform_int(5, 5) == 5
    assert a.next_u32() == b.next_u32()


def test_shuffle_is_a_permutation():
    rng = Pcg32(9, 2)
    for size in (1, 2, 3, 7, 20):
        xs = list(range(size))
        rng.shuffle(xs)
        assert sorted(xs) == list(range(size))


def test_poisson_degenerate_and_split():
    rng = Pcg32(4, 4)
    assert rng.poisson(0.0) == 0
    assert rng.poisson(-1.0) == 0
    # Both regimes produce sane values around their means.
    low = [rng.poisson(3.0) for _ in range(2_000)]
    high = [rng.poisson(50.0) for _ in range(2_000)]
    assert all(x >= 0 for x in low + high)
    assert 2.5 < math.fsum(low) / len(low) < 3.5
    assert 45.0 < math.fsum(high) / len(high) < 55.0


def test_log_factorial_matches_lgamma():
    for k in list(range(0, 40)) + [100, 1023, 1024, 1025, 5000, 100_000]:
        exact = math.lgamma(k + 1.0)
        got = log_factorial(k)
        assert got == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_mix64_is_a_bijection_sample():
    seen = {mix64(x) for x in range(10_000)}
    assert len(seen) == 10_000


def test_seed_derivation_collision_scan():
    # 10^6 derivations across runs and grid keys: every (state, seq) pair
    # must be distinct.
    seen = set()
    for grid_key in range(10):
        for run_index in range(100_000):
            seed = derive_run_seed(0, grid_key, run_index)
            seen.add((seed.state, seed.seq))
    assert len(seen) == 1_000_000


def test_seed_derivation_depends_on_every_input():
    base = derive_run_seed(1, 2, 3)
    assert derive_run_seed(1, 2, 3) == base
    assert derive_run_seed(9, 2, 3) != base
    assert derive_run_seed(1, 9, 3) != base
    assert derive_run_seed(1, 2, 9) != base


def test_grid_point_key_binds_parameter_values():
    params = ModelParams(n_agents=100, n_extroverts=50)
    key = grid_point_key(params)
    assert grid_point_key(params.replace()) == key
    assert grid_point_key(params.replace(n_extroverts=51)) != key
    assert grid_point_key(params.replace(contact_rate=2.5)) != key
    assert grid_point_key(params.replace(max_duration=21)) != key
    assert grid_point_key(params.replace(horizon=479)) != key
    assert grid_point_key(params.replace(tau_introvert=5.5)) != key


@settings(max_examples=200, deadline=None)
@given(st.integers(0, (1 << 64) - 1), st.integers(0, (1 << 64) - 1))
def test_derived_seeds_fit_in_64_bits(master, key):
    seed = derive_run_seed(master, key, 12)
    assert 0 <= seed.state < (1 << 64)
    assert 0 <= seed.seq < (1 << 64)


def test_poisson_moments():
    assert poisson_moment_problems() == []


def test_uniform_frequencies():
    assert uniform_frequency_problems() == []


def test_shuffle_frequencies():
    assert shuffle_frequency_problems() == []
