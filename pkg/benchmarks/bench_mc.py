#!/usr/bin/env python3
"""Compare the compiled simulation kernels against the NumPy fallback.

Run from the repo root after installing the package:

    python3 benchmarks/bench_mc.py [--replications N]

Both backends are exercised on the same workloads with the same seed; the
table reports best-of-three wall times and the speedup of the compiled
extension over NumPy.
"""

from __future__ import annotations

import argparse
import time

from sispfd._kernels import available_backends, get_backend

CASE_TIMES = (2190.0, 4380.0, 6570.0, 8760.0)
LAM = 6.1e-5
EFF = 0.42
SEED = 20260825


def best_of(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--replications", type=int, default=200_000)
    args = parser.parse_args()
    reps = args.replications

    workloads = [
        ("pfd 2oo6, 4 tests", lambda k: k.simulate_pfd(2, 6, LAM, EFF, CASE_TIMES, reps, SEED)),
        ("pfd 1oo1, 1 test", lambda k: k.simulate_pfd(1, 1, LAM, EFF, (8760.0,), reps, SEED)),
        ("observation counts", lambda k: k.simulate_observation_counts(
            LAM, EFF, CASE_TIMES, reps, SEED)),
        ("curve, 17 pts/interval", lambda k: k.downtime_curve_counts(
            2, 6, LAM, EFF, CASE_TIMES, reps, SEED, 17)),
    ]

    names = available_backends()
    print(f"backends: {', '.join(names)}   replications: {reps}")
    header = f"{'workload':<26}" + "".join(f"{n:>12}" for n in names)
    if "compiled" in names and "numpy" in names:
        header += f"{'speedup':>10}"
    print(header)
    for label, work in workloads:
        times = {}
        for name in names:
            kern = get_backend(name)
            times[name] = best_of(lambda: work(kern))
        row = f"{label:<26}" + "".join(f"{times[n] * 1e3:>10.1f}ms" for n in names)
        if "compiled" in times and "numpy" in times:
            row += f"{times['numpy'] / times['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
