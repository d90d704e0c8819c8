"""Deterministic random number generation.

The simulator never touches :mod:`random` or NumPy's generators.  Everything
flows through a small PCG32 implementation plus a splitmix64-style hash used
to derive independent per-run seeds.  The compiled kernel re-implements the
exact same algorithms; the pure-Python versions here are the reference.

NOTE: every arithmetic expression in this module is mirrored bit for bit in
``_kernel.pyx``.  Do not reorder operations or "simplify" floating point math
in one file without changing the other.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

M64 = (1 << 64) - 1
M32 = (1 << 32) - 1

_PCG_MULT = 6364136223846793005
_MIX_GAMMA = 0x9E3779B97F4A7C15
_MIX_M1 = 0xBF58476D1CE4E5B9
_MIX_M2 = 0x94D049BB133111EB

_SALT_STATE = 0xA5A5B4B4C3C3D2D2
_SALT_SEQ = 0x1E1E2D2D3C3C4B4B
_KEY_DOMAIN = 0x6F666669_63655F6B

_POISSON_SPLIT = 10.0
_LOGFACT_TABLE_SIZE = 1024
_HALF_LN_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _build_logfact_table() -> list[float]:
    table = [0.0] * _LOGFACT_TABLE_SIZE
    acc = 0.0
    for k in range(1, _LOGFACT_TABLE_SIZE):
        acc = acc + math.log(float(k))
        table[k] = acc
    return table


_LOGFACT = _build_logfact_table()


def log_factorial(k: int) -> float:
    """ln(k!) via table lookup, Stirling series above the table.

    Used by the Poisson sampler instead of ``math.lgamma`` because CPython
    ships its own lgamma whose low bits can differ from the platform libm the
    compiled kernel links against.
    """
    if k < _LOGFACT_TABLE_SIZE:
        return _LOGFACT[k]
    x = k + 1.0
    inv = 1.0 / x
    series = inv * (1.0 / 12.0 - inv * inv * (1.0 / 360.0))
    return (x - 0.5) * math.log(x) - x + _HALF_LN_TWO_PI + series


def mix64(x: int) -> int:
    """One splitmix64 step: add the golden gamma, then finalize."""
    x = (x + _MIX_GAMMA) & M64
    x ^= x >> 30
    x = (x * _MIX_M1) & M64
    x ^= x >> 27
    x = (x * _MIX_M2) & M64
    x ^= x >> 31
    return x


def float_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(x)))[0]


@dataclass(frozen=True)
class RunSeed:
    """Seed material for a single simulated day: a PCG32 (state, seq) pair."""

    state: int
    seq: int


def derive_run_seed(master_seed: int, grid_key: int, run_index: int) -> RunSeed:
    """Hash (master, grid point, replicate index) into an independent seed.

    The chain is order-sensitive but depends only on the three values, so
    re-running a sweep with a different grid iteration order or worker count
    hands every replicate the same generator.
    """
    h = mix64(master_seed & M64)
    h = mix64(h ^ (grid_key & M64))
    h = mix64(h ^ (run_index & M64))
    state = mix64(h ^ _SALT_STATE)
    seq = mix64(h ^ _SALT_SEQ)
    return RunSeed(state=state, seq=seq)


def grid_point_key(params) -> int:
    """Collapse a parameter set into a 64-bit key.

    Integers feed the hash directly; floats feed it through their IEEE-754
    bit patterns.  The key binds seeds to parameter *values*, never to a
    position in some sweep grid.
    """
    h = mix64(_KEY_DOMAIN)
    for v in (
        params.n_agents,
        params.n_extroverts,
        params.horizon,
        params.max_duration,
        params.motivation_cap,
    ):
        h = mix64(h ^ (int(v) & M64))
    for x in (params.contact_rate, params.tau_extrovert, params.tau_introvert):
        h = mix64(h ^ float_bits(x))
    return h


class Pcg32:
    """PCG32 (XSH-RR variant) with the canonical seeding sequence."""

    __slots__ = ("state", "inc")

    def __init__(self, initstate: int, initseq: int) -> None:
        self.state = 0
        self.inc = ((initseq << 1) | 1) & M64
        self.next_u32()
        self.state = (self.state + (initstate & M64)) & M64
        self.next_u32()

    @classmethod
    def from_run_seed(cls, seed: RunSeed) -> "Pcg32":
        return cls(seed.state, seed.seq)

    def next_u32(self) -> int:
        old = self.state
        self.state = (old * _PCG_MULT + self.inc) & M64
        xorshifted = (((old >> 18) ^ old) >> 27) & M32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & M32

    def next_double(self) -> float:
        """53-bit uniform double in [0, 1) from two 32-bit draws."""
        a = float(self.next_u32() >> 5)
        b = float(self.next_u32() >> 6)
        return (a * 67108864.0 + b) * (1.0 / 9007199254740992.0)

    def uniform_int(self, lo: int, hi: int) -> int:
        """Uniform integer on the inclusive range [lo, hi].

        Rejection against the smallest covering bit mask, so acceptance is
        at least 50%.  A single-point range consumes no randomness.
        """
        span = hi - lo
        if span <= 0:
            return lo
        mask = span
        mask |= mask >> 1
        mask |= mask >> 2
        mask |= mask >> 4
        mask |= mask >> 8
        mask |= mask >> 16
        while True:
            v = self.next_u32() & mask
            if v <= span:
                return lo + v

    def shuffle(self, xs: list[int]) -> None:
        """In-place Fisher-Yates, iterating from the top index down."""
        for i in range(len(xs) - 1, 0, -1):
            j = self.uniform_int(0, i)
            xs[i], xs[j] = xs[j], xs[i]

    def poisson(self, mean: float) -> int:
        if mean <= 0.0:
            return 0
        if mean <= _POISSON_SPLIT:
            return self._poisson_inversion(mean)
        return self._poisson_ptrs(mean)

    def _poisson_inversion(self, mean: float) -> int:
        u = self.next_double()
        p = math.exp(-mean)
        f = p
        k = 0
        while u > f and k < 1000:
            k = k + 1
            p = p * (mean / k)
            f = f + p
        return k

    def _poisson_ptrs(self, mean: float) -> int:
        # Transformed rejection with squeeze (Hoermann's PTRS), exact for
        # large means without the long scan inversion would need.
        b = 0.931 + 2.53 * math.sqrt(mean)
        a = -0.059 + 0.02483 * b
        invalpha = 1.1239 + 1.1328 / (b - 3.4)
        vr = 0.9277 - 3.6224 / (b - 2.0)
        log_mu = math.log(mean)
        while True:
            u = self.next_double() - 0.5
            v = self.next_double()
            us = 0.5 - abs(u)
            if us <= 0.0:
                # u landed exactly on -0.5; retry rather than divide by zero.
                continue
            k = math.floor((2.0 * a / us + b) * u + mean + 0.43)
            if us >= 0.07 and v <= vr:
                return int(k)
            if k < 0.0:
                continue
            if us < 0.013 and v > us:
                continue
            if v <= 0.0:
                # log(v) below would blow up; v this small is a reject anyway.
                continue
            lhs = math.log(v * invalpha / (a / (us * us) + b))
            rhs = k * log_mu - mean - log_factorial(int(k))
            if lhs <= rhs:
                return int(k)
