"""Monte Carlo reference for MooN systems under partial/full test policies.

Each component carries two independent exponential failure clocks: the
detectable mode at rate E*lambda restarts at every test, the deep mode at
rate (1-E)*lambda restarts only at the full test closing the cycle.  The
system is down whenever fewer than M components are up.  Downtime is
integrated from exact event times, with no time grid.

Randomness comes from a counter-based generator keyed by (seed,
replication, component, mode, interval): every draw is a pure function of
its key, so replications are independent streams, results do not depend on
chunking or evaluation order, and a fixed seed reproduces results byte for
byte on a given kernel backend.  The two backends consume identical keys
and agree exactly on integer summaries; float aggregates can drift by a
few last bits between them (different log1p rounding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._kernels import get_backend
from .models import ObservationSet, SystemSpec, TestPolicy


@dataclass(frozen=True)
class SimConfig:
    """One simulation request; curve_samples is per interval (0 = no curve)."""

    spec: SystemSpec
    policy: TestPolicy
    replications: int
    seed: int
    curve_samples: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.replications, int) or self.replications < 1:
            raise ValueError(f"replications must be a positive integer, got {self.replications}")
        _check_seed(self.seed)
        if self.curve_samples != 0 and self.curve_samples < 2:
            raise ValueError("curve_samples must be 0 or at least 2 per interval")


@dataclass(frozen=True)
class SimResult:
    """Replication-averaged estimates from one simulation run."""

    pfd_avg_hat: float
    std_err: float
    u_curve_hat: tuple[tuple[float, float], ...] | None = None
    obs_counts: ObservationSet | None = None


def _check_seed(seed: int) -> None:
    if not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")


def simulate_system(config: SimConfig, backend: str | None = None) -> SimResult:
    """Estimate the cycle-average PFD; standard error from replication spread.

    Aggregation uses exact summation, so the estimate is identical however
    the replications were batched.
    """
    spec, policy = config.spec, config.policy
    kern = get_backend(backend)
    vals = kern.simulate_pfd(
        spec.m, spec.n, spec.failure_rate, policy.efficiency,
        policy.test_times, config.replications, config.seed,
    )
    reps = config.replications
    mean = math.fsum(vals) / reps
    if reps > 1:
        var = math.fsum((v - mean) ** 2 for v in vals) / (reps - 1)
        std_err = math.sqrt(var / reps)
    else:
        std_err = 0.0
    curve = None
    if config.curve_samples >= 2:
        curve = empirical_curve(config, backend)
    return SimResult(pfd_avg_hat=mean, std_err=std_err, u_curve_hat=curve)


def empirical_curve(config: SimConfig,
                    backend: str | None = None) -> tuple[tuple[float, float], ...]:
    """Mean downness across replications at fixed times through the cycle.

    Every test instant appears twice, once from each side, so the sawtooth
    shape survives plotting.
    """
    if config.curve_samples < 2:
        raise ValueError("empirical_curve needs curve_samples >= 2 per interval")
    spec, policy = config.spec, config.policy
    kern = get_backend(backend)
    t, down_counts = kern.downtime_curve_counts(
        spec.m, spec.n, spec.failure_rate, policy.efficiency,
        policy.test_times, config.replications, config.seed, config.curve_samples,
    )
    reps = config.replications
    return tuple((float(ti), int(ci) / reps) for ti, ci in zip(t, down_counts))


def simulate_observations(lam: float, e: float, policy: TestPolicy, big_k: int,
                          seed: int, backend: str | None = None) -> ObservationSet:
    """Synthetic per-test failure counts for big_k identical components."""
    if not isinstance(big_k, int) or big_k < 1:
        raise ValueError(f"big_k must be a positive integer, got {big_k}")
    _check_seed(seed)
    if not math.isfinite(lam) or lam < 0.0:
        raise ValueError(f"failure rate must be finite and nonnegative, got {lam}")
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"efficiency must be in [0, 1], got {e}")
    kern = get_backend(backend)
    counts = kern.simulate_observation_counts(lam, e, policy.test_times, big_k, seed)
    return ObservationSet(tuple(int(c) for c in counts), big_k, policy)
