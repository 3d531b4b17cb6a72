"""Core domain types for MooN safety-system test policies.

All times are in hours. Calendar conversions are fixed at
1 month = 730 h and 1 year = 8760 h so that annual test schedules and
failure-rate estimates expressed per hour stay mutually consistent.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field

HOURS_PER_MONTH = 730.0
HOURS_PER_YEAR = 8760.0

# Exact integer coefficient arithmetic is guaranteed up to this many
# components; beyond it the alternating sums overflow useful float range.
MAX_COMPONENTS = 30


@dataclass(frozen=True)
class SystemSpec:
    """An MooN voted group: at least ``m`` of ``n`` identical components
    must be operative for the safety function to succeed.

    ``failure_rate`` is the dangerous undetected failure rate of one
    component, per hour.
    """

    m: int
    n: int
    failure_rate: float

    def __post_init__(self):
        if not (isinstance(self.m, int) and isinstance(self.n, int)):
            raise TypeError("m and n must be integers")
        if not 1 <= self.m <= self.n <= MAX_COMPONENTS:
            raise ValueError(
                f"need 1 <= m <= n <= {MAX_COMPONENTS}, got m={self.m} n={self.n}"
            )
        if not (math.isfinite(self.failure_rate) and self.failure_rate >= 0.0):
            raise ValueError(f"failure_rate must be finite and >= 0, got {self.failure_rate}")


@dataclass(frozen=True)
class TestPolicy:
    """A proof-test schedule over one full-test cycle.

    ``test_times`` are the instants t_1 < t_2 < ... < t_n (hours); the last
    one is the full test that restores the system to as-good-as-new, all
    earlier ones are partial tests that detect only the ``efficiency``
    fraction of the failure rate.
    """

    efficiency: float
    test_times: tuple[float, ...]

    # The name begins with "Test"; keep test runners from collecting it.
    __test__ = False

    def __init__(self, efficiency: float, test_times):
        object.__setattr__(self, "efficiency", float(efficiency))
        object.__setattr__(self, "test_times", tuple(float(t) for t in test_times))
        self._validate()

    def _validate(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must be in [0, 1], got {self.efficiency}")
        if not self.test_times:
            raise ValueError("at least one test (the full test) is required")
        prev = 0.0
        for t in self.test_times:
            if not math.isfinite(t):
                raise ValueError("test times must be finite")
            if t <= prev:
                raise ValueError(
                    f"test times must be strictly increasing and positive, got {self.test_times}"
                )
            prev = t

    @property
    def n_tests(self) -> int:
        return len(self.test_times)

    @property
    def tau(self) -> float:
        """Full-test interval: the instant of the last (full) test."""
        return self.test_times[-1]

    @property
    def intervals(self) -> tuple[float, ...]:
        """Inter-test interval lengths T_i = t_i - t_{i-1}, with t_0 = 0."""
        prev = 0.0
        out = []
        for t in self.test_times:
            out.append(t - prev)
            prev = t
        return tuple(out)

    def previous_test_time(self, i: int) -> float:
        """Instant of the test preceding interval ``i`` (1-based); t_0 = 0."""
        if not 1 <= i <= self.n_tests:
            raise ValueError(f"interval index must be in 1..{self.n_tests}, got {i}")
        return 0.0 if i == 1 else self.test_times[i - 2]

    def interval_of(self, t: float) -> int:
        """1-based index of the interval containing instant ``t``.

        The preceding test is the latest one strictly before ``t``, so at a
        test instant this resolves to the ending interval (left limit).
        """
        if not 0.0 <= t <= self.tau:
            raise ValueError(f"t must lie in [0, {self.tau}], got {t}")
        return bisect_left(self.test_times, t) + 1 if t > 0.0 else 1


@dataclass(frozen=True)
class ObservationSet:
    """Failure counts collected during one full-test cycle.

    ``counts[i]`` is the number of components observed failed at test i+1;
    ``components_observed`` is the total number of components watched at
    every test (K).
    """

    counts: tuple[int, ...]
    components_observed: int
    policy: TestPolicy

    def __init__(self, counts, components_observed: int, policy: TestPolicy):
        object.__setattr__(self, "counts", tuple(int(k) for k in counts))
        object.__setattr__(self, "components_observed", int(components_observed))
        object.__setattr__(self, "policy", policy)
        self._validate()

    def _validate(self):
        if self.components_observed < 1:
            raise ValueError("components_observed must be >= 1")
        if len(self.counts) != self.policy.n_tests:
            raise ValueError(
                f"expected {self.policy.n_tests} counts (one per test), got {len(self.counts)}"
            )
        for k in self.counts:
            if not 0 <= k <= self.components_observed:
                raise ValueError(f"counts must be in [0, {self.components_observed}]")

    @property
    def total_failures(self) -> int:
        return sum(self.counts)

    @property
    def partial_test_failures(self) -> int:
        """Failures seen at the partial tests (all but the final full test)."""
        return sum(self.counts[:-1])
