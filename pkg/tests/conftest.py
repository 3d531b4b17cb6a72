"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own closed forms: interval
averages come from adaptive quadrature over the binomial survival function,
and availability cross-checks use the direct k-of-n tail written out
locally.  Expected values frozen into tests were produced by these oracles.
"""

import math
import sys

import numpy as np
import pytest
import scipy.integrate

from sispfd import SystemSpec, TestPolicy

# Reference configuration used throughout: a 2oo6 group with quarterly
# partial tests and a yearly full test.
CASE_LAMBDA = 6.1e-5
CASE_EFFICIENCY = 0.42
CASE_TIMES = (2190.0, 4380.0, 6570.0, 8760.0)
TAU = 8760.0


@pytest.fixture
def case_spec():
    return SystemSpec(m=2, n=6, failure_rate=CASE_LAMBDA)


@pytest.fixture
def case_policy():
    return TestPolicy(efficiency=CASE_EFFICIENCY, test_times=CASE_TIMES)


def binomial_unavailability(m, n, lam, eff, times, t, i=None):
    """P(fewer than m components up) at instant t, written out directly.

    Component availability since its effective renewal is
    a = exp(-lam*(t - E*t_prev)); the group is down when at most m-1
    components survive.  ``i`` overrides the interval (right limits).
    """
    if i is None:
        i = 1
        for k, tk in enumerate(times, start=1):
            if t > tk:
                i = k + 1
    t_prev = 0.0 if i == 1 else times[i - 2]
    a = math.exp(-lam * (t - eff * t_prev))
    return sum(math.comb(n, k) * a**k * (1.0 - a) ** (n - k) for k in range(m))


def quad_interval_average(m, n, lam, eff, times, i):
    """Mean unavailability over interval i by adaptive quadrature."""
    t_prev = 0.0 if i == 1 else times[i - 2]
    t_i = times[i - 1]

    def u(t):
        a = math.exp(-lam * (t - eff * t_prev))
        return sum(math.comb(n, k) * a**k * (1.0 - a) ** (n - k) for k in range(m))

    val, _ = scipy.integrate.quad(u, t_prev, t_i, epsabs=0.0, epsrel=1e-11, limit=300)
    return val / (t_i - t_prev)


def quad_cycle_average(m, n, lam, eff, times):
    """Mean unavailability over the whole cycle: length-weighted intervals."""
    tau = times[-1]
    acc = 0.0
    t_prev = 0.0
    for i, t_i in enumerate(times, start=1):
        acc += quad_interval_average(m, n, lam, eff, times, i) * (t_i - t_prev)
        t_prev = t_i
    return acc / tau


def random_configs(count, seed=20260825, max_n=8, max_lam_tau=2.0, max_tests=6):
    """Deterministic randomized configurations for property grids."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        m = int(rng.integers(1, n + 1))
        lam_tau = float(rng.uniform(0.0, max_lam_tau))
        eff = float(rng.uniform(0.0, 1.0))
        n_tests = int(rng.integers(1, max_tests + 1))
        gaps = rng.uniform(0.1, 1.0, n_tests)
        times = np.cumsum(gaps)
        times = tuple(float(t) for t in times / times[-1] * TAU)
        out.append((m, n, lam_tau / TAU, eff, times))
    return out


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # Surface the acceptance PASS/FAIL lines even when stdout is captured.
    for name, mod in sys.modules.items():
        if name.rpartition(".")[2] == "test_acceptance" and getattr(mod, "LINES", None):
            terminalreporter.section("acceptance criteria")
            for line in mod.LINES:
                terminalreporter.write_line(line)
            break
