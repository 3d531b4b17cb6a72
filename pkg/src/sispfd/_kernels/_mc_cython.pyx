# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the NumPy simulation kernels.

Semantics are identical to _mc_numpy: the same keyed counter generator and
the same event ordering, so a given seed reproduces the same results on
either backend (bit for bit on integer summaries; floats match to the last
couple of bits, since NumPy's vectorized log1p rounds differently from
libm's).  The only structural difference is an optimization: the key chain
mix(mix(mix(mix(mix(seed)->unit)->comp)->mode)->interval) is cached at
every prefix instead of recomputed per draw, which changes nothing about
the produced keys.
"""

import numpy as np

from libc.math cimport log1p, INFINITY

BACKEND_NAME = "compiled"

MODE_PARTIAL = 1
MODE_FULL = 2

DEF MAXN = 30
DEF C_MODE_PARTIAL = 1
DEF C_MODE_FULL = 2

cdef unsigned long long GOLD = 0x9E3779B97F4A7C15ULL


cdef inline unsigned long long mix64(unsigned long long z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double exp_draw(unsigned long long h, double rate) noexcept nogil:
    cdef double u = <double> (h >> 11) * (1.0 / 9007199254740992.0)
    if rate == 0.0:
        return INFINITY
    return -log1p(-u) / rate


cdef inline double kth_smallest(double* a, int n, int k) noexcept nogil:
    # Partial selection sort; n <= MAXN so quadratic cost is irrelevant.
    cdef int i, j, mi
    cdef double tmp
    for i in range(k):
        mi = i
        for j in range(i + 1, n):
            if a[j] < a[mi]:
                mi = j
        tmp = a[i]
        a[i] = a[mi]
        a[mi] = tmp
    return a[k - 1]


def simulate_pfd(int m, int n, double lam, double eff, times, Py_ssize_t reps,
                 unsigned long long seed):
    """Per-replication fraction of the cycle the system spends failed."""
    cdef double[::1] tv = np.ascontiguousarray(times, dtype=np.float64)
    cdef Py_ssize_t n_tests = tv.shape[0]
    cdef double tau = tv[n_tests - 1]
    cdef int need = n - m + 1
    cdef double rate_a = eff * lam
    cdef double rate_b = (1.0 - eff) * lam
    out_arr = np.empty(reps, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double xb[MAXN]
    cdef double onset[MAXN]
    cdef unsigned long long ha[MAXN]
    cdef unsigned long long h_seed, h_rep, h_comp
    cdef Py_ssize_t r, i
    cdef int c
    cdef double t_prev, ti, kth, down
    h_seed = mix64(seed ^ GOLD)
    with nogil:
        for r in range(reps):
            h_rep = mix64(h_seed ^ (GOLD * (<unsigned long long> r + 1ULL)))
            for c in range(n):
                h_comp = mix64(h_rep ^ (GOLD * (<unsigned long long> c + 1ULL)))
                xb[c] = exp_draw(
                    mix64(mix64(h_comp ^ (GOLD * (C_MODE_FULL + 1ULL))) ^ GOLD),
                    rate_b)
                ha[c] = mix64(h_comp ^ (GOLD * (C_MODE_PARTIAL + 1ULL)))
            down = 0.0
            t_prev = 0.0
            for i in range(1, n_tests + 1):
                ti = tv[i - 1] - t_prev
                for c in range(n):
                    onset[c] = exp_draw(
                        mix64(ha[c] ^ (GOLD * (<unsigned long long> i + 1ULL))),
                        rate_a)
                    if xb[c] - t_prev < onset[c]:
                        onset[c] = xb[c] - t_prev
                kth = kth_smallest(onset, n, need)
                if kth < 0.0:
                    kth = 0.0
                elif kth > ti:
                    kth = ti
                down += ti - kth
                t_prev = tv[i - 1]
            out[r] = down / tau
    return out_arr


def simulate_observation_counts(double lam, double eff, times, Py_ssize_t big_k,
                                unsigned long long seed):
    """Failures found at each test across big_k independent components."""
    cdef double[::1] tv = np.ascontiguousarray(times, dtype=np.float64)
    cdef Py_ssize_t n_tests = tv.shape[0]
    cdef double tau = tv[n_tests - 1]
    cdef double rate_a = eff * lam
    cdef double rate_b = (1.0 - eff) * lam
    counts_arr = np.zeros(n_tests, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef unsigned long long h_seed, h_comp, h_part
    cdef Py_ssize_t u, i
    cdef double t_prev, ti, xa, xb
    cdef bint found
    h_seed = mix64(seed ^ GOLD)
    with nogil:
        for u in range(big_k):
            h_comp = mix64(mix64(h_seed ^ (GOLD * (<unsigned long long> u + 1ULL))) ^ GOLD)
            xb = exp_draw(
                mix64(mix64(h_comp ^ (GOLD * (C_MODE_FULL + 1ULL))) ^ GOLD),
                rate_b)
            h_part = mix64(h_comp ^ (GOLD * (C_MODE_PARTIAL + 1ULL)))
            t_prev = 0.0
            for i in range(1, n_tests + 1):
                ti = tv[i - 1] - t_prev
                xa = exp_draw(
                    mix64(h_part ^ (GOLD * (<unsigned long long> i + 1ULL))),
                    rate_a)
                found = xa < ti
                if i == n_tests:
                    found = found or (xb < tau)
                if found:
                    counts[i - 1] += 1
                t_prev = tv[i - 1]
    return counts_arr


def downtime_curve_counts(int m, int n, double lam, double eff, times, Py_ssize_t reps,
                          unsigned long long seed, int samples_per_interval):
    """Sample times plus, at each, the number of replications found down."""
    cdef double[::1] tv = np.ascontiguousarray(times, dtype=np.float64)
    cdef Py_ssize_t n_tests = tv.shape[0]
    cdef int need = n - m + 1
    cdef double rate_a = eff * lam
    cdef double rate_b = (1.0 - eff) * lam
    cdef int p = samples_per_interval
    t_arr = np.empty(n_tests * p, dtype=np.float64)
    counts_arr = np.zeros(n_tests * p, dtype=np.int64)
    cdef double[::1] t_out = t_arr
    cdef long long[::1] down_counts = counts_arr
    cdef double xb[MAXN]
    cdef double onset[MAXN]
    cdef unsigned long long ha[MAXN]
    cdef unsigned long long h_seed, h_rep, h_comp
    cdef Py_ssize_t r, i
    cdef int c, j
    cdef double t_prev, ti, s, kth
    t_prev = 0.0
    for i in range(1, n_tests + 1):
        ti = tv[i - 1] - t_prev
        for j in range(p):
            t_out[(i - 1) * p + j] = t_prev + ti * j / (p - 1)
        t_prev = tv[i - 1]
    h_seed = mix64(seed ^ GOLD)
    with nogil:
        for r in range(reps):
            h_rep = mix64(h_seed ^ (GOLD * (<unsigned long long> r + 1ULL)))
            for c in range(n):
                h_comp = mix64(h_rep ^ (GOLD * (<unsigned long long> c + 1ULL)))
                xb[c] = exp_draw(
                    mix64(mix64(h_comp ^ (GOLD * (C_MODE_FULL + 1ULL))) ^ GOLD),
                    rate_b)
                ha[c] = mix64(h_comp ^ (GOLD * (C_MODE_PARTIAL + 1ULL)))
            t_prev = 0.0
            for i in range(1, n_tests + 1):
                ti = tv[i - 1] - t_prev
                for c in range(n):
                    onset[c] = exp_draw(
                        mix64(ha[c] ^ (GOLD * (<unsigned long long> i + 1ULL))),
                        rate_a)
                    if xb[c] - t_prev < onset[c]:
                        onset[c] = xb[c] - t_prev
                kth = kth_smallest(onset, n, need)
                for j in range(p):
                    s = ti * j / (p - 1)
                    if j == p - 1:
                        if kth < s:
                            down_counts[(i - 1) * p + j] += 1
                    elif kth <= s:
                        down_counts[(i - 1) * p + j] += 1
                t_prev = tv[i - 1]
    return t_arr, counts_arr
