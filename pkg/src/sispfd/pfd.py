"""Closed-form PFD of MooN systems under partial and full proof tests.

Model: each of the N identical components fails dangerously at constant
rate lambda.  Partial tests detect (and immediately repair) a fraction E
of that rate; the final full test repairs everything.  Between tests the
component availability is

    a(t) = exp(E * lambda * t_prev) * exp(-lambda * t)

where t_prev is the latest test instant strictly before t.  The system is
available while at least M components are; expanding the k-of-n structure
function gives the system availability as a signed-coefficient sum of
exponentials, and its time averages in closed form.

Point evaluations at a test instant return the left limit (the value just
before the repairs performed by that test); the sampled curve carries both
one-sided values so the repair sawtooth is preserved.

Floating-point note: the averaged forms subtract a near-unity alternating
sum from 1, which cancels catastrophically when the true PFD is tiny
relative to the summed coefficient magnitude.  Every such evaluation
estimates its own cancellation error and transparently re-evaluates in
high-precision arithmetic when float64 cannot deliver ~1e-10 relative
(or ~2e-13 absolute) accuracy.  Results are deterministic either way.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import comb

import mpmath

from .models import SystemSpec, TestPolicy

# Estimated float64 rounding error per unit of summed absolute magnitude
# (a few ulp; validated against the high-precision path in the test suite).
_F64_TERM_ERROR = 1.1e-15
# Escalate when the error estimate exceeds this absolute budget ...
_ABS_ERROR_BUDGET = 2e-13
# ... or when it exceeds this fraction of the computed value.
_REL_ERROR_BUDGET = 1e-10
# High-precision digits start here and double until the surviving value
# clears the accumulated-rounding floor; deep redundancy at tiny rates can
# cancel through 40+ digits, so one fixed precision is not enough.
_MP_DPS = 40
_MP_DPS_CAP = 640

# Below this exponent, (1 - exp(-a))/a switches to its Taylor form.
_PHI_SMALL = 1e-8

# Approximation formulas assume lambda * tau well under this product.
APPROX_LAMBDA_TAU_LIMIT = 1e-2


class ApproximationDomainWarning(UserWarning):
    """Raised when a Taylor-based approximation is used outside lambda*tau << 1e-2."""


def s_coefficient(m: int, n: int, x: int) -> int:
    """Signed integer weight of exp(-x*lambda*t) in the MooN availability.

    Expanding the k-of-n binomial structure function into a sum of pure
    exponentials yields, for each x in M..N,

        S(M, N, x) = sum_{k=M..x} C(N, x) * C(x, k) * (-1)^(x-k)

    computed here in exact integer arithmetic.
    """
    if not (1 <= m <= x <= n <= 30):
        raise ValueError(f"need 1 <= m <= x <= n <= 30, got m={m} x={x} n={n}")
    acc = 0
    for k in range(m, x + 1):
        acc += comb(x, k) * (-1) ** (x - k)
    return comb(n, x) * acc


def s_coefficients(m: int, n: int) -> tuple[int, ...]:
    """All weights S(M, N, x) for x = M..N, in order."""
    return tuple(s_coefficient(m, n, x) for x in range(m, n + 1))


def _phi(a: float) -> float:
    """(1 - exp(-a)) / a, stable down to a = 0 (limit 1)."""
    if a < 0.0:
        raise ValueError("negative exponent")
    if a < _PHI_SMALL:
        return 1.0 - a / 2.0 + a * a / 6.0
    return -math.expm1(-a) / a


def _needs_escalation(value: float, sum_abs: float) -> bool:
    err = _F64_TERM_ERROR * sum_abs
    return err > _ABS_ERROR_BUDGET or value < err / _REL_ERROR_BUDGET


def _mp_reliable(value, magnitude, dps) -> bool:
    """True when a high-precision result survived its own rounding.

    The summation error is about magnitude * 10**(3 - dps); demanding
    value > magnitude * 10**(20 - dps) leaves ~17 digits of headroom, more
    than float64 will keep of the returned value.
    """
    return value > magnitude * mpmath.mpf(10) ** (20 - dps)


def _clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else (1.0 if v > 1.0 else v)


# ---------------------------------------------------------------------------
# Availability
# ---------------------------------------------------------------------------

def component_availability(spec: SystemSpec, policy: TestPolicy, t: float) -> float:
    """Availability of one component at instant t (left limit at tests)."""
    i = policy.interval_of(t)
    t_prev = policy.previous_test_time(i)
    lam, eff = spec.failure_rate, policy.efficiency
    return math.exp(-lam * (t - eff * t_prev))


def system_availability(spec: SystemSpec, policy: TestPolicy, t: float) -> float:
    """MooN system availability at instant t via the signed-coefficient sum."""
    i = policy.interval_of(t)
    t_prev = policy.previous_test_time(i)
    lam, eff = spec.failure_rate, policy.efficiency
    if lam == 0.0:
        return 1.0
    total = 0.0
    sum_abs = 0.0
    for x in range(spec.m, spec.n + 1):
        term = s_coefficient(spec.m, spec.n, x) * math.exp(
            -x * lam * (t - eff * t_prev)
        )
        total += term
        sum_abs += abs(term)
    if _needs_escalation(total, sum_abs):
        total = _mp_availability(spec, lam, eff, t, t_prev)
    return _clamp01(total)


def _mp_availability(spec: SystemSpec, lam: float, eff: float,
                     t: float, t_prev: float) -> float:
    # Arguments must be rebuilt in extended precision too: float64 rounding
    # inside the exponents costs more than the summation does.
    dps = _MP_DPS
    while True:
        with mpmath.workdps(dps):
            mexp = mpmath.mpf(lam) * (mpmath.mpf(t) - mpmath.mpf(eff) * mpmath.mpf(t_prev))
            acc = mpmath.mpf(0)
            mag = mpmath.mpf(0)
            for x in range(spec.m, spec.n + 1):
                term = s_coefficient(spec.m, spec.n, x) * mpmath.exp(-x * mexp)
                acc += term
                mag += abs(term)
            if _mp_reliable(acc, mag, dps) or dps >= _MP_DPS_CAP:
                return float(acc)
        dps *= 2


def system_availability_direct(spec: SystemSpec, policy: TestPolicy, t: float) -> float:
    """MooN system availability as the direct binomial sum over components.

    Algebraically identical to :func:`system_availability`; kept as an
    independent route for cross-checking the expansion.
    """
    a = component_availability(spec, policy, t)
    total = 0.0
    for k in range(spec.m, spec.n + 1):
        total += comb(spec.n, k) * a**k * (1.0 - a) ** (spec.n - k)
    return _clamp01(total)


def system_unavailability(spec: SystemSpec, policy: TestPolicy, t: float,
                          interval: int | None = None) -> float:
    """U(t) = 1 - A(t), evaluated cancellation-free.

    Sums the binomial upper tail in the component unavailability
    q(t) = 1 - a(t), so tiny unavailabilities keep full relative accuracy.
    ``interval`` overrides the left-limit convention (pass i+1 at t_i for
    the right limit).
    """
    i = interval if interval is not None else policy.interval_of(t)
    t_prev = policy.previous_test_time(i)
    lam, eff = spec.failure_rate, policy.efficiency
    expo = lam * (t - eff * t_prev)
    q = -math.expm1(-expo)
    one_minus_q = math.exp(-expo)
    down_needed = spec.n - spec.m + 1
    total = 0.0
    for j in range(down_needed, spec.n + 1):
        total += comb(spec.n, j) * q**j * one_minus_q ** (spec.n - j)
    return _clamp01(total)


# ---------------------------------------------------------------------------
# Interval and cycle averages
# ---------------------------------------------------------------------------

def _pfd_terms(spec: SystemSpec, policy: TestPolicy, indices) -> float:
    """1 minus the averaged availability sum over the given intervals.

    For a single interval i the average weights are phi-factors over T_i;
    over the whole cycle each interval contributes with weight T_i / tau.
    Escalates to high precision when cancellation would eat the result.
    """
    lam, eff = spec.failure_rate, policy.efficiency
    if lam == 0.0:
        return 0.0
    times = policy.test_times
    lengths = policy.intervals
    total_len = sum(lengths[i - 1] for i in indices)
    coeffs = s_coefficients(spec.m, spec.n)

    acc = 0.0
    sum_abs = 1.0
    for xi, x in enumerate(range(spec.m, spec.n + 1)):
        s = coeffs[xi]
        inner = 0.0
        for i in indices:
            t_prev = 0.0 if i == 1 else times[i - 2]
            ti = lengths[i - 1]
            inner += (
                math.exp(-x * (1.0 - eff) * lam * t_prev)
                * _phi(x * lam * ti)
                * (ti / total_len)
            )
        acc += s * inner
        sum_abs += abs(s * inner)
    value = 1.0 - acc

    if _needs_escalation(value, sum_abs):
        value = _mp_pfd_terms(spec, policy, indices)
    return _clamp01(value)


def _mp_pfd_terms(spec: SystemSpec, policy: TestPolicy, indices) -> float:
    # Rebuild every argument in extended precision as well; float64 rounding
    # in the exponents alone would defeat the escalation.
    lam, eff = spec.failure_rate, policy.efficiency
    times = policy.test_times
    lengths = policy.intervals
    coeffs = s_coefficients(spec.m, spec.n)
    dps = _MP_DPS
    while True:
        with mpmath.workdps(dps):
            mlam = mpmath.mpf(lam)
            hidden = mpmath.mpf(1) - mpmath.mpf(eff)
            mtotal = mpmath.fsum(mpmath.mpf(lengths[i - 1]) for i in indices)
            macc = mpmath.mpf(0)
            mag = mpmath.mpf(1)
            for xi, x in enumerate(range(spec.m, spec.n + 1)):
                s = coeffs[xi]
                inner = mpmath.mpf(0)
                for i in indices:
                    t_prev = mpmath.mpf(0.0 if i == 1 else times[i - 2])
                    ti = mpmath.mpf(lengths[i - 1])
                    a = x * mlam * ti
                    phi = -mpmath.expm1(-a) / a
                    inner += mpmath.exp(-x * hidden * mlam * t_prev) * phi * (ti / mtotal)
                macc += s * inner
                mag += abs(s * inner)
            value = 1 - macc
            if _mp_reliable(value, mag, dps) or dps >= _MP_DPS_CAP:
                return float(value)
        dps *= 2


def pfd_interval(spec: SystemSpec, policy: TestPolicy, i: int) -> float:
    """Mean unavailability over the i-th inter-test interval (1-based)."""
    if not 1 <= i <= policy.n_tests:
        raise ValueError(f"interval index must be in 1..{policy.n_tests}, got {i}")
    return _pfd_terms(spec, policy, (i,))


def pfd_avg(spec: SystemSpec, policy: TestPolicy) -> float:
    """Mean unavailability over the whole full-test cycle [0, tau]."""
    return _pfd_terms(spec, policy, tuple(range(1, policy.n_tests + 1)))


def pfd_avg_no_partial(spec: SystemSpec, tau: float, approx: bool = False) -> float:
    """Cycle-average PFD when the only test is the full test at ``tau``.

    With ``approx=True`` returns the leading-order form
    C(N, M-1) * (lambda*tau)^(N-M+1) / (N-M+2) instead of the exact value.
    """
    if not (math.isfinite(tau) and tau > 0.0):
        raise ValueError(f"tau must be positive and finite, got {tau}")
    if approx:
        order = spec.n - spec.m + 1
        return comb(spec.n, spec.m - 1) * (spec.failure_rate * tau) ** order / (order + 1)
    return pfd_avg(spec, TestPolicy(0.0, (tau,)))


# ---------------------------------------------------------------------------
# Taylor approximations (valid for lambda * tau well under 1e-2)
# ---------------------------------------------------------------------------

def _warn_if_out_of_domain(spec: SystemSpec, tau: float):
    if spec.failure_rate * tau > APPROX_LAMBDA_TAU_LIMIT:
        warnings.warn(
            f"lambda*tau = {spec.failure_rate * tau:.3g} exceeds "
            f"{APPROX_LAMBDA_TAU_LIMIT:g}; first-order approximation may be poor",
            ApproximationDomainWarning,
            stacklevel=3,
        )


def component_availability_approx(spec: SystemSpec, policy: TestPolicy, t: float) -> float:
    """First-order component availability 1 + E*lambda*t_prev - lambda*t."""
    _warn_if_out_of_domain(spec, policy.tau)
    i = policy.interval_of(t)
    t_prev = policy.previous_test_time(i)
    return 1.0 + policy.efficiency * spec.failure_rate * t_prev - spec.failure_rate * t


def system_availability_approx(spec: SystemSpec, policy: TestPolicy, t: float) -> float:
    """Leading-order system availability 1 - C(N,M-1)*(lambda*(t - E*t_prev))^(N-M+1)."""
    _warn_if_out_of_domain(spec, policy.tau)
    i = policy.interval_of(t)
    t_prev = policy.previous_test_time(i)
    order = spec.n - spec.m + 1
    return 1.0 - comb(spec.n, spec.m - 1) * (
        spec.failure_rate * (t - policy.efficiency * t_prev)
    ) ** order


def pfd_interval_approx(spec: SystemSpec, policy: TestPolicy, i: int) -> float:
    """Leading-order mean unavailability over interval i."""
    if not 1 <= i <= policy.n_tests:
        raise ValueError(f"interval index must be in 1..{policy.n_tests}, got {i}")
    _warn_if_out_of_domain(spec, policy.tau)
    lam, eff = spec.failure_rate, policy.efficiency
    t_i = policy.test_times[i - 1]
    t_prev = policy.previous_test_time(i)
    order = spec.n - spec.m + 1
    span = (t_i - eff * t_prev) ** (order + 1) - (t_prev * (1.0 - eff)) ** (order + 1)
    return (
        comb(spec.n, spec.m - 1)
        * lam**order
        / (order + 1)
        * span
        / (t_i - t_prev)
    )


def pfd_avg_approx(spec: SystemSpec, policy: TestPolicy) -> float:
    """Leading-order cycle-average PFD."""
    _warn_if_out_of_domain(spec, policy.tau)
    lam, eff = spec.failure_rate, policy.efficiency
    order = spec.n - spec.m + 1
    acc = 0.0
    t_prev = 0.0
    for t_i in policy.test_times:
        acc += (t_i - eff * t_prev) ** (order + 1) - (t_prev * (1.0 - eff)) ** (order + 1)
        t_prev = t_i
    return comb(spec.n, spec.m - 1) * lam**order / (order + 1) * acc / policy.tau


# ---------------------------------------------------------------------------
# Curve sampling and worst-case unavailability
# ---------------------------------------------------------------------------

def max_unavailability(spec: SystemSpec, policy: TestPolicy,
                       resolution: int = 64) -> tuple[float, float]:
    """Worst instantaneous unavailability over the cycle and where it occurs.

    U(t) only grows between tests, so the maximum sits at the left limit of
    a test instant; a grid of ``resolution`` samples per interval guards the
    selection.  Ties resolve to the latest instant.
    """
    if resolution < 16:
        raise ValueError(f"resolution must be >= 16, got {resolution}")
    best_t, best_u = policy.tau, 0.0
    t_prev = 0.0
    for i, t_i in enumerate(policy.test_times, start=1):
        u_end = system_unavailability(spec, policy, t_i, interval=i)
        step = (t_i - t_prev) / resolution
        u_scan = max(
            system_unavailability(spec, policy, t_prev + j * step, interval=i)
            for j in range(1, resolution)
        )
        u_here = max(u_end, u_scan)
        if u_here >= best_u:
            best_t, best_u = t_i, u_here
        t_prev = t_i
    return best_t, best_u


def sample_curve(spec: SystemSpec, policy: TestPolicy,
                 points_per_interval: int = 33) -> tuple[tuple[float, float], ...]:
    """Piecewise samples of U(t), keeping both one-sided values at each test.

    Each interval contributes ``points_per_interval`` samples from its start
    (right limit, just after the preceding repairs) to its end (left limit,
    just before the next test), so test instants appear twice with the
    sawtooth drop between the duplicates.
    """
    if points_per_interval < 2:
        raise ValueError(f"points_per_interval must be >= 2, got {points_per_interval}")
    out = []
    t_prev = 0.0
    for i, t_i in enumerate(policy.test_times, start=1):
        span = t_i - t_prev
        for j in range(points_per_interval):
            t = t_prev + span * j / (points_per_interval - 1)
            out.append((t, system_unavailability(spec, policy, t, interval=i)))
        t_prev = t_i
    return tuple(out)


def _sample_curve_approx(spec: SystemSpec, policy: TestPolicy,
                         points_per_interval: int) -> tuple[tuple[float, float], ...]:
    """Curve analog of :func:`sample_curve` from the leading-order availability."""
    lam, eff = spec.failure_rate, policy.efficiency
    order = spec.n - spec.m + 1
    c = comb(spec.n, spec.m - 1)
    out = []
    t_prev = 0.0
    for t_i in policy.test_times:
        span = t_i - t_prev
        for j in range(points_per_interval):
            t = t_prev + span * j / (points_per_interval - 1)
            out.append((t, c * (lam * (t - eff * t_prev)) ** order))
        t_prev = t_i
    return tuple(out)


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PfdReport:
    """Evaluation summary for one system and test policy."""

    pfd_per_interval: tuple[float, ...]
    pfd_avg: float
    u_max: float
    t_u_max: float
    curve: tuple[tuple[float, float], ...]

    def __post_init__(self):
        probs = (*self.pfd_per_interval, self.pfd_avg, self.u_max,
                 *(u for _, u in self.curve))
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("all probabilities must lie in [0, 1]")


def evaluate_policy(spec: SystemSpec, policy: TestPolicy,
                    curve_points: int = 33, approx: bool = False) -> PfdReport:
    """Full PFD evaluation of a policy: per-interval, average, peak, curve."""
    if approx:
        per_interval = tuple(
            _clamp01(pfd_interval_approx(spec, policy, i))
            for i in range(1, policy.n_tests + 1)
        )
        avg = _clamp01(pfd_avg_approx(spec, policy))
        curve = _sample_curve_approx(spec, policy, curve_points)
        curve = tuple((t, _clamp01(u)) for t, u in curve)
        t_star, u_max = max(
            ((t, u) for t, u in curve), key=lambda p: (p[1], p[0])
        )
    else:
        per_interval = tuple(
            pfd_interval(spec, policy, i) for i in range(1, policy.n_tests + 1)
        )
        avg = pfd_avg(spec, policy)
        curve = sample_curve(spec, policy, curve_points)
        t_star, u_max = max_unavailability(spec, policy)
    return PfdReport(per_interval, avg, u_max, t_star, curve)
