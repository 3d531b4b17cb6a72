"""Estimate component failure rate and partial-test efficiency from test records.

First-order observation model: the chance of finding a given component
failed at partial test i is about E*lambda*T_i (only the detectable
fraction, accumulated since the previous test), while the final full test
also reveals everything the partial tests missed over the whole cycle,
adding (1-E)*lambda*tau.  Summing over the cycle, the expected fraction of
failed observations per component is lambda*tau exactly, which gives the
moment estimators

    lambda_hat = sum(k_i) / (K * tau)
    e_hat      = (tau / t_{n-1}) * sum(k_i, partial tests) / sum(k_i)

Counts are binomial, so exact Clopper-Pearson intervals apply: to lambda
through p = lambda*tau, and to the efficiency through the fraction of
failures caught by partial tests, theta = E * t_{n-1} / tau, conditioned
on the total failure count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import betaincinv

from .models import ObservationSet, TestPolicy

DEFAULT_CONFIDENCE_LEVEL = 0.90

# The linear observation model degrades once lambda*tau is no longer small;
# estimates are still produced, with a warning.
FIRST_ORDER_LIMIT = 0.1


class UndefinedEstimateError(ValueError):
    """The requested estimator has no defined value for these observations."""


class ObservationModelError(ValueError):
    """The first-order observation model is out of its validity range."""


def predicted_obs(lam: float, efficiency: float, policy: TestPolicy, i: int) -> float:
    """Modeled probability of observing a component failed at test ``i``."""
    n = policy.n_tests
    if not 1 <= i <= n:
        raise ValueError(f"test index must be in 1..{n}, got {i}")
    t_i = policy.intervals[i - 1]
    p = efficiency * lam * t_i
    if i == n:
        p += (1.0 - efficiency) * lam * policy.tau
    if p > 1.0:
        raise ObservationModelError(
            f"first-order observation probability {p:.4g} exceeds 1; "
            "model invalid for these parameters"
        )
    return p


def empirical_obs(obs: ObservationSet, i: int) -> float:
    """Observed failure fraction k_i / K at test ``i``."""
    n = obs.policy.n_tests
    if not 1 <= i <= n:
        raise ValueError(f"test index must be in 1..{n}, got {i}")
    return obs.counts[i - 1] / obs.components_observed


def binomial_ci(k: int, big_k: int, level: float) -> tuple[float, float]:
    """Exact (Clopper-Pearson) two-sided confidence interval for a proportion.

    Bounds come from inverting the regularized incomplete beta function;
    the edge cases pin the lower bound at 0 for k = 0 and the upper at 1
    for k = K.
    """
    if not 0 <= k <= big_k:
        raise ValueError(f"need 0 <= k <= {big_k}, got {k}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must be in (0, 1), got {level}")
    alpha = 1.0 - level
    lower = 0.0 if k == 0 else float(betaincinv(k, big_k - k + 1, alpha / 2.0))
    upper = 1.0 if k == big_k else float(betaincinv(k + 1, big_k - k, 1.0 - alpha / 2.0))
    return lower, upper


@dataclass(frozen=True)
class Estimate:
    """A point estimate with a two-sided confidence interval."""

    value: float
    lower: float
    upper: float
    level: float
    warnings: tuple[str, ...] = ()


def estimate_lambda(obs: ObservationSet, level: float = DEFAULT_CONFIDENCE_LEVEL) -> Estimate:
    """Failure rate per hour from the total failure count over the cycle."""
    total = obs.total_failures
    big_k = obs.components_observed
    tau = obs.policy.tau
    lam_hat = total / (big_k * tau)
    notes = []
    if total == 0:
        notes.append("no failures observed; only the upper confidence bound is informative")
    if total > big_k:
        notes.append(
            "total failure count exceeds the number of observed components; "
            "binomial confidence interval unavailable"
        )
        return Estimate(lam_hat, lam_hat, lam_hat, level, tuple(notes))
    p_lo, p_hi = binomial_ci(total, big_k, level)
    return Estimate(lam_hat, p_lo / tau, p_hi / tau, level, tuple(notes))


@dataclass(frozen=True)
class EfficiencyEstimate(Estimate):
    """Efficiency estimate; ``raw`` keeps the unclamped ratio value."""

    raw: float = 0.0


def estimate_efficiency(obs: ObservationSet,
                        level: float = DEFAULT_CONFIDENCE_LEVEL) -> EfficiencyEstimate:
    """Partial-test efficiency from the split of failures across test kinds."""
    total = obs.total_failures
    if total == 0:
        raise UndefinedEstimateError("efficiency is undefined when no failures were observed")
    if obs.policy.n_tests < 2:
        raise UndefinedEstimateError("efficiency needs at least one partial test")
    partial = obs.partial_test_failures
    tau = obs.policy.tau
    t_last_partial = obs.policy.test_times[-2]
    scale = tau / t_last_partial
    raw = scale * partial / total
    notes = []
    value = raw
    if raw > 1.0:
        value = 1.0
        notes.append(f"raw efficiency estimate {raw:.4g} exceeds 1; clamped")
    th_lo, th_hi = binomial_ci(partial, total, level)
    lo = min(1.0, scale * th_lo)
    hi = min(1.0, scale * th_hi)
    return EfficiencyEstimate(value, lo, hi, level, tuple(notes), raw=raw)


@dataclass(frozen=True)
class EstimationResult:
    """Joint estimation summary for one observation set."""

    lambda_hat: float
    lambda_ci: tuple[float, float] | None
    e_hat: float | None
    e_hat_raw: float | None
    e_ci: tuple[float, float] | None
    level: float
    warnings: tuple[str, ...]


def estimate_all(obs: ObservationSet,
                 level: float = DEFAULT_CONFIDENCE_LEVEL) -> EstimationResult:
    """Estimate lambda and E together, surfacing undefined cases as warnings."""
    lam = estimate_lambda(obs, level)
    notes = list(lam.warnings)
    if obs.total_failures > obs.components_observed:
        lam_ci = None
    else:
        lam_ci = (lam.lower, lam.upper)

    e_hat = e_raw = None
    e_ci = None
    try:
        eff = estimate_efficiency(obs, level)
        e_hat, e_raw, e_ci = eff.value, eff.raw, (eff.lower, eff.upper)
        notes.extend(eff.warnings)
    except UndefinedEstimateError as exc:
        notes.append(f"efficiency estimate undefined: {exc}")

    lam_tau = lam.value * obs.policy.tau
    if lam_tau > FIRST_ORDER_LIMIT:
        notes.append(
            f"lambda_hat*tau = {lam_tau:.3g} stretches the first-order "
            "observation model; estimates may be biased low"
        )
    return EstimationResult(lam.value, lam_ci, e_hat, e_raw, e_ci, level, tuple(notes))
