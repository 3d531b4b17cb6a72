"""Choose partial-test times that minimize the cycle-average PFD.

The search works on interval gaps rather than test times: a vector of n-1
free gaps is mapped through abs() and, when the gaps overrun the cycle,
rescaled so the implied times stay inside [0, tau].  That keeps the
objective defined everywhere, so a simplex-lattice scan (every integer
composition of the resolution into n parts) can seed a local box
refinement and a final Nelder-Mead polish without constraint handling.
Coincident or boundary times are merged before evaluation, so a collapsed
gap simply means one fewer partial test.

The equi-spaced baseline is always kept as a candidate, which guarantees
the reported optimum never falls behind it.  Everything is deterministic:
same inputs and settings, bit-identical result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np
from scipy.optimize import minimize

from .models import SystemSpec, TestPolicy
from .pfd import max_unavailability, pfd_avg

MERGE_EPS_REL = 1e-9


@dataclass(frozen=True)
class SolverSettings:
    """Tuning knobs for the schedule search.

    grid_offset shifts every lattice candidate by the given fraction of a
    cell along each gap axis; distinct offsets give independent starting
    grids that should agree on the final objective.
    """

    coarse_resolution: int = 16
    lattice_budget: int = 4000
    refine_levels: int = 2
    refine_points: int = 7
    refine_budget: int = 8000
    xatol_hours: float = 0.01
    fatol: float = 1e-12
    max_iterations: int = 4000
    grid_offset: float = 0.0

    def __post_init__(self) -> None:
        if self.coarse_resolution < 1:
            raise ValueError("coarse_resolution must be >= 1")
        if not -0.5 < self.grid_offset < 0.5:
            raise ValueError("grid_offset must lie in (-0.5, 0.5)")


@dataclass(frozen=True)
class OptimizationResult:
    """Optimized schedule with its baseline comparison."""

    optimal_times: tuple[float, ...]
    pfd_avg_opt: float
    pfd_avg_baseline: float
    pfd_reduction: float
    u_max_opt: float
    u_max_baseline: float
    u_max_reduction: float
    converged: bool
    solver_trace: dict = field(repr=False)


@dataclass(frozen=True)
class PolicyComparison:
    """Side-by-side metrics for two schedules of the same cycle."""

    pfd_avg_baseline: float
    pfd_avg_candidate: float
    pfd_reduction: float
    u_max_baseline: float
    u_max_candidate: float
    u_max_reduction: float


def normalize_times(times, tau: float) -> tuple[float, ...]:
    """Sort candidate partial-test times and merge coincident or boundary ones."""
    eps = MERGE_EPS_REL * tau
    out: list[float] = []
    for t in sorted(times):
        if t <= eps or t >= tau - eps:
            continue
        if out and t - out[-1] <= eps:
            continue
        out.append(float(t))
    return tuple(out)


def _fold_gaps(x: np.ndarray, tau: float) -> np.ndarray:
    """Map free gaps to partial-test times inside [0, tau]."""
    g = np.abs(np.asarray(x, dtype=float))
    total = g.sum()
    if total > tau:
        g = g * (tau / total)
    return np.cumsum(g)


def schedule_objective(spec: SystemSpec, efficiency: float, times, tau: float) -> float:
    """Cycle-average PFD of the schedule given by ``times`` plus a full test at tau."""
    merged = normalize_times(times, tau)
    policy = TestPolicy(efficiency, merged + (tau,))
    return pfd_avg(spec, policy)


def _reduction(base: float, cand: float) -> float:
    return 0.0 if base == 0.0 else 1.0 - cand / base


def _lattice_resolution(n_parts: int, cap: int, budget: int) -> int:
    r = 1
    while r < cap and comb(r + n_parts, n_parts - 1) <= budget:
        r += 1
    return r


def _compositions(total: int, parts: int):
    # Stars and bars: place parts-1 separators among total+parts-1 slots.
    for seps in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        c = []
        for s in seps:
            c.append(s - prev - 1)
            prev = s
        c.append(total + parts - 1 - prev - 1)
        yield c


def optimize_schedule(spec: SystemSpec, efficiency: float, n_tests: int, tau: float,
                      settings: SolverSettings | None = None) -> OptimizationResult:
    """Find partial-test times minimizing the average PFD over one full cycle.

    n_tests counts every test in the cycle including the final full one, so
    n_tests - 1 partial-test times are free.  Baseline metrics refer to the
    equi-spaced schedule with the same n_tests.
    """
    if settings is None:
        settings = SolverSettings()
    if not isinstance(n_tests, int) or not 1 <= n_tests <= 48:
        raise ValueError(f"n_tests must be an integer in 1..48, got {n_tests}")
    if not math.isfinite(tau) or tau <= 0.0:
        raise ValueError(f"tau must be positive and finite, got {tau}")
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError(f"efficiency must be in [0, 1], got {efficiency}")

    base_policy = TestPolicy(efficiency, tuple(j * tau / n_tests for j in range(1, n_tests + 1)))
    pfd_base = pfd_avg(spec, base_policy)
    _, u_base = max_unavailability(spec, base_policy)

    d = n_tests - 1
    if d == 0 or efficiency == 0.0:
        # Partial tests reveal nothing at zero efficiency, so every schedule
        # ties; report the baseline itself rather than a float-noise winner.
        return OptimizationResult(
            optimal_times=base_policy.test_times[:-1],
            pfd_avg_opt=pfd_base,
            pfd_avg_baseline=pfd_base,
            pfd_reduction=0.0,
            u_max_opt=u_base,
            u_max_baseline=u_base,
            u_max_reduction=0.0,
            converged=True,
            solver_trace={"lattice": 0, "refine": 0, "polish": 0, "total_evaluations": 0},
        )
    evals = {"lattice": 0, "refine": 0, "polish": 0}

    def objective(x: np.ndarray) -> float:
        return schedule_objective(spec, efficiency, _fold_gaps(x, tau), tau)

    base_x = np.full(d, tau / n_tests)
    best_x = base_x
    best_f = pfd_base
    polish_ok = True
    trace: dict = {}

    if d > 0:
        res = _lattice_resolution(n_tests, settings.coarse_resolution, settings.lattice_budget)
        cell = tau / res
        for c in _compositions(res, n_tests):
            x = (np.asarray(c[:d], dtype=float) + settings.grid_offset) * cell
            f = objective(x)
            evals["lattice"] += 1
            if f < best_f:
                best_f, best_x = f, x
        trace["lattice_resolution"] = res

        r = settings.refine_points
        if r ** d > settings.refine_budget:
            r = max(3, int(settings.refine_budget ** (1.0 / d)))
        if r % 2 == 0:
            r -= 1
        width = cell
        for _ in range(settings.refine_levels):
            axes = [np.linspace(v - width, v + width, r) for v in best_x]
            for point in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d):
                f = objective(point)
                evals["refine"] += 1
                if f < best_f:
                    best_f, best_x = f, point
            width /= max(r - 1, 1) / 2.0

        step = cell / 2.0
        simplex = np.vstack([best_x, best_x + step * np.eye(d)])
        nm = minimize(
            objective, best_x, method="Nelder-Mead",
            options=dict(
                xatol=settings.xatol_hours, fatol=settings.fatol,
                maxiter=settings.max_iterations, maxfev=settings.max_iterations,
                initial_simplex=simplex,
            ),
        )
        evals["polish"] = int(nm.nfev)
        polish_ok = bool(nm.success)
        trace["polish_iterations"] = int(nm.nit)
        if nm.fun < best_f:
            best_f, best_x = float(nm.fun), nm.x

    opt_times = normalize_times(_fold_gaps(best_x, tau), tau)
    opt_policy = TestPolicy(efficiency, opt_times + (tau,))
    pfd_opt = pfd_avg(spec, opt_policy)
    _, u_opt = max_unavailability(spec, opt_policy)

    trace.update(evals)
    trace["total_evaluations"] = sum(evals.values())
    return OptimizationResult(
        optimal_times=opt_times,
        pfd_avg_opt=pfd_opt,
        pfd_avg_baseline=pfd_base,
        pfd_reduction=_reduction(pfd_base, pfd_opt),
        u_max_opt=u_opt,
        u_max_baseline=u_base,
        u_max_reduction=_reduction(u_base, u_opt),
        converged=polish_ok,
        solver_trace=trace,
    )


def compare_policies(spec: SystemSpec, efficiency: float, baseline: TestPolicy,
                     candidate: TestPolicy) -> PolicyComparison:
    """Compare two schedules under a common efficiency; cycles must match."""
    if not math.isclose(baseline.tau, candidate.tau, rel_tol=1e-12):
        raise ValueError(
            f"policies cover different cycles: {baseline.tau} vs {candidate.tau} hours"
        )
    pols = [TestPolicy(efficiency, p.test_times) for p in (baseline, candidate)]
    pfd_b, pfd_c = (pfd_avg(spec, p) for p in pols)
    u_b = max_unavailability(spec, pols[0])[1]
    u_c = max_unavailability(spec, pols[1])[1]
    return PolicyComparison(
        pfd_avg_baseline=pfd_b,
        pfd_avg_candidate=pfd_c,
        pfd_reduction=_reduction(pfd_b, pfd_c),
        u_max_baseline=u_b,
        u_max_candidate=u_c,
        u_max_reduction=_reduction(u_b, u_c),
    )
