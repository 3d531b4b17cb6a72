"""Vectorized NumPy implementation of the simulation kernels.

The compiled extension mirrors this module statement for statement; both
must keep identical semantics.  All randomness comes from a keyed counter
generator (splitmix64 finalizer over a chained key), so any draw is a pure
function of (seed, unit, component, mode, interval).  Replications never
share state, which makes results independent of chunking.  Each backend is
byte-deterministic for a given seed; between backends, integer summaries
match exactly while float outputs can differ in the last couple of bits,
because NumPy's vectorized log1p rounds differently from libm's.

Per replication, every component gets one failure time per mode: the
partial-detectable clock (rate E*lambda) restarts at each test, giving one
draw per interval; the deep-failure clock (rate (1-E)*lambda) runs from
the cycle start, one draw total.  Within an interval the component goes
down at the earlier of the two pending failures; the system goes down when
n-m+1 components are down, and its downtime is integrated exactly from
those event times.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

MODE_PARTIAL = 1
MODE_FULL = 2

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_ONE = np.uint64(1)
_U53 = 1.0 / 9007199254740992.0  # 2**-53

_CHUNK = 1 << 14


def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _stream(seed, unit, comp, mode, interval):
    h = _mix64(np.uint64(seed) ^ _GOLD)
    h = _mix64(h ^ (_GOLD * (unit + _ONE)))
    h = _mix64(h ^ (_GOLD * (comp + _ONE)))
    h = _mix64(h ^ (_GOLD * np.uint64(mode + 1)))
    return _mix64(h ^ (_GOLD * np.uint64(interval + 1)))


def _exp_draws(h, rate):
    u = (h >> np.uint64(11)).astype(np.float64) * _U53
    if rate == 0.0:
        return np.full(u.shape, np.inf)
    return -np.log1p(-u) / rate


def simulate_pfd(m, n, lam, eff, times, reps, seed):
    """Per-replication fraction of the cycle the system spends failed."""
    with np.errstate(over="ignore"):
        return _simulate_pfd(m, n, lam, eff, times, reps, seed)


def _simulate_pfd(m, n, lam, eff, times, reps, seed):
    times = np.asarray(times, dtype=np.float64)
    tau = times[-1]
    need = n - m + 1
    rate_a = eff * lam
    rate_b = (1.0 - eff) * lam
    comps = np.arange(n, dtype=np.uint64)[None, :]
    out = np.empty(reps, dtype=np.float64)
    for lo in range(0, reps, _CHUNK):
        hi = min(lo + _CHUNK, reps)
        units = np.arange(lo, hi, dtype=np.uint64)[:, None]
        xb = _exp_draws(_stream(seed, units, comps, MODE_FULL, 0), rate_b)
        down = np.zeros(hi - lo, dtype=np.float64)
        t_prev = 0.0
        for i, t_i in enumerate(times, start=1):
            ti = t_i - t_prev
            xa = _exp_draws(_stream(seed, units, comps, MODE_PARTIAL, i), rate_a)
            onset = np.minimum(xa, xb - t_prev)
            kth = np.partition(onset, need - 1, axis=1)[:, need - 1]
            down += ti - np.clip(kth, 0.0, ti)
            t_prev = t_i
        out[lo:hi] = down / tau
    return out


def simulate_observation_counts(lam, eff, times, big_k, seed):
    """Failures found at each test across big_k independent components.

    Partial tests see only the detectable mode since the previous test; the
    final full test also reveals any deep failure from the whole cycle.
    """
    with np.errstate(over="ignore"):
        return _simulate_observation_counts(lam, eff, times, big_k, seed)


def _simulate_observation_counts(lam, eff, times, big_k, seed):
    times = np.asarray(times, dtype=np.float64)
    tau = times[-1]
    n_tests = len(times)
    rate_a = eff * lam
    rate_b = (1.0 - eff) * lam
    comp = np.uint64(0)
    counts = np.zeros(n_tests, dtype=np.int64)
    for lo in range(0, big_k, _CHUNK):
        hi = min(lo + _CHUNK, big_k)
        units = np.arange(lo, hi, dtype=np.uint64)
        xb = _exp_draws(_stream(seed, units, comp, MODE_FULL, 0), rate_b)
        t_prev = 0.0
        for i, t_i in enumerate(times, start=1):
            ti = t_i - t_prev
            xa = _exp_draws(_stream(seed, units, comp, MODE_PARTIAL, i), rate_a)
            found = xa < ti
            if i == n_tests:
                found |= xb < tau
            counts[i - 1] += np.count_nonzero(found)
            t_prev = t_i
    return counts


def downtime_curve_counts(m, n, lam, eff, times, reps, seed, samples_per_interval):
    """Sample times plus, at each, the number of replications found down.

    Each interval contributes samples_per_interval points from its start
    (just after the previous test) to its end (just before its own test),
    so test instants appear twice with the two one-sided values.
    """
    with np.errstate(over="ignore"):
        return _downtime_curve_counts(m, n, lam, eff, times, reps, seed,
                                      samples_per_interval)


def _downtime_curve_counts(m, n, lam, eff, times, reps, seed, samples_per_interval):
    times = np.asarray(times, dtype=np.float64)
    n_tests = len(times)
    need = n - m + 1
    rate_a = eff * lam
    rate_b = (1.0 - eff) * lam
    p = samples_per_interval
    comps = np.arange(n, dtype=np.uint64)[None, :]
    t_out = np.empty(n_tests * p, dtype=np.float64)
    down_counts = np.zeros(n_tests * p, dtype=np.int64)
    t_prev = 0.0
    for i, t_i in enumerate(times, start=1):
        ti = t_i - t_prev
        for j in range(p):
            t_out[(i - 1) * p + j] = t_prev + ti * j / (p - 1)
        t_prev = t_i
    for lo in range(0, reps, _CHUNK):
        hi = min(lo + _CHUNK, reps)
        units = np.arange(lo, hi, dtype=np.uint64)[:, None]
        xb = _exp_draws(_stream(seed, units, comps, MODE_FULL, 0), rate_b)
        t_prev = 0.0
        for i, t_i in enumerate(times, start=1):
            ti = t_i - t_prev
            xa = _exp_draws(_stream(seed, units, comps, MODE_PARTIAL, i), rate_a)
            onset = np.minimum(xa, xb - t_prev)
            kth = np.partition(onset, need - 1, axis=1)[:, need - 1]
            for j in range(p):
                s = ti * j / (p - 1)
                if j == p - 1:
                    hits = kth < s
                else:
                    hits = kth <= s
                down_counts[(i - 1) * p + j] += np.count_nonzero(hits)
            t_prev = t_i
    return t_out, down_counts
