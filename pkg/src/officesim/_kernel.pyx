# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled day loop and random stream.

This module transcribes ``engine._simulate_py`` and the ``rng.Pcg32``
algorithms into C.  Bit-for-bit agreement with the pure-Python reference is
a hard requirement (the parity test suite enforces it), so expression order
must never drift between the two copies.  The build adds -ffp-contract=off
so the compiler cannot fuse float multiply-adds and break that agreement.
"""

from libc.math cimport M_PI, exp, fabs, floor, log, sqrt
from libc.stdint cimport int64_t, uint32_t, uint64_t
from libc.stdlib cimport free, malloc


# ---------------------------------------------------------------- RNG core

cdef struct Rng:
    uint64_t state
    uint64_t inc


cdef inline uint32_t rng_next_u32(Rng* r) noexcept:
    cdef uint64_t old = r.state
    r.state = old * 6364136223846793005ULL + r.inc
    cdef uint32_t xorshifted = <uint32_t>(((old >> 18) ^ old) >> 27)
    cdef uint32_t rot = <uint32_t>(old >> 59)
    return (xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))


cdef inline void rng_seed(Rng* r, uint64_t initstate, uint64_t initseq) noexcept:
    r.state = 0
    r.inc = (initseq << 1) | 1
    rng_next_u32(r)
    r.state = r.state + initstate
    rng_next_u32(r)


cdef inline double rng_next_double(Rng* r) noexcept:
    # Two statements: C gives no evaluation-order guarantee inside one
    # expression, and the draw order must match the Python reference.
    cdef double a = <double>(rng_next_u32(r) >> 5)
    cdef double b = <double>(rng_next_u32(r) >> 6)
    return (a * 67108864.0 + b) * (1.0 / 9007199254740992.0)


cdef inline int64_t rng_uniform_int(Rng* r, int64_t lo, int64_t hi) noexcept:
    cdef uint32_t span, mask, v
    if hi <= lo:
        return lo
    span = <uint32_t>(hi - lo)
    mask = span
    mask |= mask >> 1
    mask |= mask >> 2
    mask |= mask >> 4
    mask |= mask >> 8
    mask |= mask >> 16
    while True:
        v = rng_next_u32(r) & mask
        if v <= span:
            return lo + <int64_t>v


# ------------------------------------------------------------ Poisson draws

cdef double _logfact_table[1024]
cdef double _half_ln_two_pi = 0.0


cdef void _build_tables() noexcept:
    global _half_ln_two_pi
    cdef double acc = 0.0
    cdef int k
    _logfact_table[0] = 0.0
    for k in range(1, 1024):
        acc = acc + log(<double>k)
        _logfact_table[k] = acc
    _half_ln_two_pi = 0.5 * log(2.0 * M_PI)


_build_tables()


cdef inline double _log_factorial(int64_t k) noexcept:
    cdef double x, inv, series
    if k < 1024:
        return _logfact_table[k]
    x = <double>k + 1.0
    inv = 1.0 / x
    series = inv * (1.0 / 12.0 - inv * inv * (1.0 / 360.0))
    return (x - 0.5) * log(x) - x + _half_ln_two_pi + series


cdef inline int64_t _poisson_inversion(Rng* r, double mean) noexcept:
    cdef double u = rng_next_double(r)
    cdef double p = exp(-mean)
    cdef double f = p
    cdef int64_t k = 0
    while u > f and k < 1000:
        k = k + 1
        p = p * (mean / <double>k)
        f = f + p
    return k


cdef int64_t _poisson_ptrs(Rng* r, double mean) noexcept:
    cdef double b, a, invalpha, vr, log_mu, u, v, us, kd, lhs, rhs
    b = 0.931 + 2.53 * sqrt(mean)
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    log_mu = log(mean)
    while True:
        u = rng_next_double(r) - 0.5
        v = rng_next_double(r)
        us = 0.5 - fabs(u)
        if us <= 0.0:
            continue
        kd = floor((2.0 * a / us + b) * u + mean + 0.43)
        if us >= 0.07 and v <= vr:
            return <int64_t>kd
        if kd < 0.0:
            continue
        if us < 0.013 and v > us:
            continue
        if v <= 0.0:
            continue
        lhs = log(v * invalpha / (a / (us * us) + b))
        rhs = kd * log_mu - mean - _log_factorial(<int64_t>kd)
        if lhs <= rhs:
            return <int64_t>kd


cdef inline int64_t rng_poisson(Rng* r, double mean) noexcept:
    if mean <= 0.0:
        return 0
    if mean <= 10.0:
        return _poisson_inversion(r, mean)
    return _poisson_ptrs(r, mean)


# ------------------------------------------------------------- day kernel

def simulate_day(
    int n,
    int ne,
    int horizon,
    int dmax,
    double q,
    double tau_e,
    double tau_i,
    int cap,
    unsigned long long state,
    unsigned long long seq,
    int want_series,
    int trace_e,
    int trace_i,
):
    """Run one day; same argument list and return tuple as _simulate_py."""
    if n < 1 or not 0 <= ne <= n or horizon < 1 or dmax < 1 or cap < 1:
        raise ValueError("invalid model dimensions")
    cdef bint want_trace = trace_e >= 0
    if want_trace and not (0 <= trace_e < n and 0 <= trace_i < n):
        raise ValueError("trace ids out of range")

    cdef Py_ssize_t series_len = horizon + 1
    cdef Py_ssize_t n_slots = 5 * n
    if want_series:
        n_slots += 4 * series_len
    if want_trace:
        n_slots += 4 * series_len
    cdef int64_t* arena = <int64_t*> malloc(n_slots * sizeof(int64_t))
    if arena == NULL:
        raise MemoryError()

    cdef int64_t* motivation = arena
    cdef int64_t* partner = arena + n
    cdef int64_t* rem = arena + 2 * n
    cdef int64_t* order = arena + 3 * n
    cdef int64_t* cum = arena + 4 * n
    cdef int64_t* sp_e = NULL
    cdef int64_t* sp_i = NULL
    cdef int64_t* sl_e = NULL
    cdef int64_t* sl_i = NULL
    cdef int64_t* tl_e = NULL
    cdef int64_t* tl_i = NULL
    cdef int64_t* tc_e = NULL
    cdef int64_t* tc_i = NULL
    cdef Py_ssize_t off = 5 * n
    if want_series:
        sp_e = arena + off
        sp_i = arena + off + series_len
        sl_e = arena + off + 2 * series_len
        sl_i = arena + off + 3 * series_len
        off += 4 * series_len
    if want_trace:
        tl_e = arena + off
        tl_i = arena + off + series_len
        tc_e = arena + off + 2 * series_len
        tc_i = arena + off + 3 * series_len
        off += 4 * series_len

    cdef Rng r
    cdef Py_ssize_t t
    cdef int i, idx, k, peer, mate
    cdef int64_t j, m, att, d, lk, pk, spe, spi, sle, sli, rr
    cdef int n_free = n
    cdef double ratio, denom, lf, p, u
    cdef double ratio_e = horizon / tau_e
    cdef double ratio_i = horizon / tau_i
    cdef double denom_e = ratio_e - 1.0
    cdef double denom_i = ratio_i - 1.0

    rng_seed(&r, state, seq)
    for k in range(n):
        motivation[k] = 1
        partner[k] = -1
        rem[k] = 0
        cum[k] = 0
    if want_series:
        for t in range(series_len):
            sp_e[t] = 0
            sp_i[t] = 0
            sl_e[t] = 0
            sl_i[t] = 0
        sl_e[0] = ne
        sl_i[0] = n - ne
    if want_trace:
        for t in range(series_len):
            tl_e[t] = 1
            tl_i[t] = 1
            tc_e[t] = 0
            tc_i[t] = 0

    try:
        for t in range(1, horizon + 1):
            for i in range(n):
                order[i] = i
            for i in range(n - 1, 0, -1):
                j = rng_uniform_int(&r, 0, i)
                order[i], order[j] = order[j], order[i]
            for idx in range(n):
                k = <int>order[idx]
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
                lf = <double>lk
                if lf > ratio:
                    p = 0.0
                elif ratio == 1.0:
                    p = 1.0
                else:
                    p = (ratio - lf) / denom
                u = rng_next_double(&r)
                if u < p and n_free > 1:
                    m = rng_poisson(&r, q)
                    for att in range(m):
                        j = rng_uniform_int(&r, 0, n - 2)
                        peer = <int>(j if j < k else j + 1)
                        if partner[peer] < 0:
                            d = rng_uniform_int(&r, 1, dmax)
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
                mate = <int>partner[k]
                if mate > k:
                    rr = rem[k] - 1
                    rem[k] = rr
                    if rr == 0:
                        partner[k] = -1
                        partner[mate] = -1
                        n_free += 2

        cum_list = [cum[k] for k in range(n)]
        l_final = [motivation[k] for k in range(n)]
        if want_series:
            sp_e_l = [sp_e[t] for t in range(series_len)]
            sp_i_l = [sp_i[t] for t in range(series_len)]
            sl_e_l = [sl_e[t] for t in range(series_len)]
            sl_i_l = [sl_i[t] for t in range(series_len)]
        else:
            sp_e_l = sp_i_l = sl_e_l = sl_i_l = None
        if want_trace:
            tl_e_l = [tl_e[t] for t in range(series_len)]
            tl_i_l = [tl_i[t] for t in range(series_len)]
            tc_e_l = [tc_e[t] for t in range(series_len)]
            tc_i_l = [tc_i[t] for t in range(series_len)]
        else:
            tl_e_l = tl_i_l = tc_e_l = tc_i_l = None
    finally:
        free(arena)
    return (cum_list, l_final, sp_e_l, sp_i_l, sl_e_l, sl_i_l,
            tl_e_l, tl_i_l, tc_e_l, tc_i_l)


# ------------------------------------------------- helpers for test suites

def stream_u32(unsigned long long state, unsigned long long seq, Py_ssize_t count):
    """First `count` raw 32-bit outputs for a seed pair."""
    cdef Rng r
    rng_seed(&r, state, seq)
    cdef Py_ssize_t i
    out = []
    for i in range(count):
        out.append(rng_next_u32(&r))
    return out


def stream_double(unsigned long long state, unsigned long long seq, Py_ssize_t count):
    cdef Rng r
    rng_seed(&r, state, seq)
    cdef Py_ssize_t i
    out = []
    for i in range(count):
        out.append(rng_next_double(&r))
    return out


def uniform_int_batch(
    unsigned long long state,
    unsigned long long seq,
    int64_t lo,
    int64_t hi,
    Py_ssize_t count,
):
    cdef Rng r
    rng_seed(&r, state, seq)
    cdef Py_ssize_t i
    out = []
    for i in range(count):
        out.append(rng_uniform_int(&r, lo, hi))
    return out


def poisson_batch(
    unsigned long long state, unsigned long long seq, double mean, Py_ssize_t count
):
    cdef Rng r
    rng_seed(&r, state, seq)
    cdef Py_ssize_t i
    out = []
    for i in range(count):
        out.append(rng_poisson(&r, mean))
    return out


def shuffle_hist(
    unsigned long long state, unsigned long long seq, int size, Py_ssize_t count
):
    """Histogram over `count` shuffles of range(size): permutation -> hits."""
    if size < 1 or size > 16:
        raise ValueError("size must be in [1, 16]")
    cdef Rng r
    rng_seed(&r, state, seq)
    cdef int64_t items[16]
    cdef Py_ssize_t rep
    cdef int i
    cdef int64_t j
    hist = {}
    for rep in range(count):
        for i in range(size):
            items[i] = i
        for i in range(size - 1, 0, -1):
            j = rng_uniform_int(&r, 0, i)
            items[i], items[j] = items[j], items[i]
        key = tuple(items[i] for i in range(size))
        if key in hist:
            hist[key] += 1
        else:
            hist[key] = 1
    return hist
