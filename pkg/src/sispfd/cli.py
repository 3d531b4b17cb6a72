"""Command-line front end: evaluate, estimate, optimize, simulate.

All four subcommands read one JSON config document.  Times may be plain
numbers (hours) or strings with a unit suffix: "h" hours, "mo" months of
730 h, "y" years of 8760 h.  Sections used per command:

    system        {"m": 2, "n": 6, "failure_rate_per_hour": 6.1e-5}
    policy        {"efficiency": 0.42, "test_times": ["3mo", "6mo", "9mo", "1y"]}
    observations  {"counts": [5, 6, 5, 35], "components_observed": 96}
    estimation    {"level": 0.90}
    optimize      {"n_tests": 4, "tau": "1y", "grid_offset": 0.0}
    simulation    {"replications": 100000, "seed": 42, "curve_samples": 33}
    sil_thresholds  optional band override, see sispfd.sil

Reports go to stdout as JSON (or --out FILE); unavailability curves go to
--curve FILE as CSV with header t_hours,unavailability.  Test instants
appear twice in curves, once per side, so sawtooth plots render correctly.
Exit codes: 0 success (warnings included), 2 config error, 3 internal
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone

from . import __version__
from ._kernels import active_backend_name
from .estimation import DEFAULT_CONFIDENCE_LEVEL, estimate_all
from .models import HOURS_PER_MONTH, HOURS_PER_YEAR, ObservationSet, SystemSpec, TestPolicy
from .optimize import SolverSettings, optimize_schedule
from .pfd import evaluate_policy, sample_curve
from .sil import classify_sil, load_thresholds
from .simulate import SimConfig, empirical_curve, simulate_system

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTERNAL = 3

_UNIT_HOURS = {"h": 1.0, "mo": HOURS_PER_MONTH, "y": HOURS_PER_YEAR}


class ConfigError(Exception):
    """Invalid configuration; message carries the config path."""

    def __init__(self, path: str, reason: str) -> None:
        super().__init__(f"{path}: {reason}")


def parse_duration(value, path: str = "duration") -> float:
    """Hours from a number or a suffixed string like '3mo', '1.5y', '24h'."""
    if isinstance(value, bool):
        raise ConfigError(path, "expected a duration, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        for suffix in ("mo", "y", "h"):
            if text.endswith(suffix):
                number = text[: -len(suffix)].strip()
                try:
                    return float(number) * _UNIT_HOURS[suffix]
                except ValueError:
                    raise ConfigError(path, f"bad duration number in {value!r}") from None
        try:
            return float(text)
        except ValueError:
            raise ConfigError(
                path, f"bad duration {value!r}; use a number of hours or a 'h'/'mo'/'y' suffix"
            ) from None
    raise ConfigError(path, f"expected a duration, got {type(value).__name__}")


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(path, f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(path, f"invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(path, "top level must be a JSON object")
    return cfg


def _section(cfg: dict, name: str, required: bool) -> dict:
    sec = cfg.get(name)
    if sec is None:
        if required:
            raise ConfigError(name, "section missing")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(name, "must be a JSON object")
    return sec


def _get(sec: dict, path: str, key: str, required: bool = True, default=None):
    if key not in sec:
        if required:
            raise ConfigError(f"{path}.{key}", "field missing")
        return default
    return sec[key]


def _system_from(cfg: dict) -> SystemSpec:
    sec = _section(cfg, "system", required=True)
    m = _get(sec, "system", "m")
    n = _get(sec, "system", "n")
    lam = _get(sec, "system", "failure_rate_per_hour")
    try:
        return SystemSpec(m, n, float(lam))
    except (TypeError, ValueError) as exc:
        raise ConfigError("system", str(exc)) from None


def _policy_from(cfg: dict) -> TestPolicy:
    sec = _section(cfg, "policy", required=True)
    eff = _get(sec, "policy", "efficiency")
    raw_times = _get(sec, "policy", "test_times")
    if not isinstance(raw_times, (list, tuple)) or not raw_times:
        raise ConfigError("policy.test_times", "expected a non-empty array of durations")
    times = [
        parse_duration(v, f"policy.test_times[{i}]") for i, v in enumerate(raw_times)
    ]
    try:
        return TestPolicy(float(eff), tuple(times))
    except (TypeError, ValueError) as exc:
        raise ConfigError("policy", str(exc)) from None


def _observations_from(cfg: dict, policy: TestPolicy) -> ObservationSet:
    sec = _section(cfg, "observations", required=True)
    counts = _get(sec, "observations", "counts")
    big_k = _get(sec, "observations", "components_observed")
    if not isinstance(counts, list):
        raise ConfigError("observations.counts", "expected an array of integers")
    try:
        return ObservationSet(tuple(int(c) for c in counts), int(big_k), policy)
    except (TypeError, ValueError) as exc:
        raise ConfigError("observations", str(exc)) from None


def _thresholds_from(cfg: dict):
    sec = cfg.get("sil_thresholds")
    if sec is None:
        return load_thresholds()
    if not isinstance(sec, dict):
        raise ConfigError("sil_thresholds", "must be a JSON object")
    return sec


def write_curve_csv(path: str, curve) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t_hours,unavailability\n")
        for t, u in curve:
            fh.write(f"{t!r},{u!r}\n")


def _classify(cfg: dict, pfd: float) -> dict:
    band = classify_sil(pfd, _thresholds_from(cfg))
    return {"sil_band": band.band, "sil_below_scale": band.below_scale}


def _evaluate_report(cfg: dict, spec: SystemSpec, policy: TestPolicy, approx: bool) -> tuple:
    report = evaluate_policy(spec, policy, approx=approx)
    out = {
        "pfd_avg": report.pfd_avg,
        "pfd_per_interval": list(report.pfd_per_interval),
        "u_max": report.u_max,
        "t_u_max": report.t_u_max,
        **_classify(cfg, report.pfd_avg),
        "approximation_used": approx,
    }
    return out, report


def cmd_evaluate(cfg: dict, args) -> dict:
    spec = _system_from(cfg)
    policy = _policy_from(cfg)
    out, report = _evaluate_report(cfg, spec, policy, args.approx)
    if args.curve:
        write_curve_csv(args.curve, report.curve)
    return out


def cmd_estimate(cfg: dict, args) -> dict:
    policy = _policy_from(cfg)
    obs = _observations_from(cfg, policy)
    level = args.level
    if level is None:
        level = _section(cfg, "estimation", required=False).get("level", DEFAULT_CONFIDENCE_LEVEL)
    est = estimate_all(obs, float(level))
    out = {
        "lambda_hat": est.lambda_hat,
        "lambda_ci": list(est.lambda_ci) if est.lambda_ci else None,
        "e_hat": est.e_hat,
        "e_hat_raw": est.e_hat_raw,
        "e_ci": list(est.e_ci) if est.e_ci else None,
        "level": est.level,
        "warnings": list(est.warnings),
    }
    if args.then_evaluate:
        if est.e_hat is None:
            out["warnings"].append("evaluation skipped: efficiency estimate undefined")
        else:
            spec = _system_from(cfg)
            fitted_spec = SystemSpec(spec.m, spec.n, est.lambda_hat)
            fitted_policy = TestPolicy(est.e_hat, policy.test_times)
            eval_out, report = _evaluate_report(cfg, fitted_spec, fitted_policy, approx=False)
            out["evaluation"] = eval_out
            if args.curve:
                write_curve_csv(args.curve, report.curve)
    return out


def cmd_optimize(cfg: dict, args) -> dict:
    spec = _system_from(cfg)
    sec = _section(cfg, "optimize", required=False)
    pol_sec = _section(cfg, "policy", required=False)
    eff = sec.get("efficiency", pol_sec.get("efficiency"))
    if eff is None:
        raise ConfigError("optimize.efficiency", "field missing (or give policy.efficiency)")
    if "n_tests" in sec:
        n_tests = sec["n_tests"]
    elif "test_times" in pol_sec:
        n_tests = len(pol_sec["test_times"])
    else:
        raise ConfigError("optimize.n_tests", "field missing (or give policy.test_times)")
    if "tau" in sec:
        tau = parse_duration(sec["tau"], "optimize.tau")
    elif "test_times" in pol_sec:
        tau = _policy_from(cfg).tau
    else:
        raise ConfigError("optimize.tau", "field missing (or give policy.test_times)")
    settings = SolverSettings(grid_offset=float(sec.get("grid_offset", 0.0)))
    try:
        result = optimize_schedule(spec, float(eff), int(n_tests), tau, settings)
    except (TypeError, ValueError) as exc:
        raise ConfigError("optimize", str(exc)) from None
    out = {
        "optimal_times_hours": list(result.optimal_times),
        "optimal_times_months": [t / HOURS_PER_MONTH for t in result.optimal_times],
        "pfd_avg_opt": result.pfd_avg_opt,
        "pfd_avg_baseline": result.pfd_avg_baseline,
        "pfd_reduction": result.pfd_reduction,
        "u_max_opt": result.u_max_opt,
        "u_max_baseline": result.u_max_baseline,
        "u_max_reduction": result.u_max_reduction,
        "converged": result.converged,
        "solver_trace": result.solver_trace,
    }
    if not result.converged:
        out["warnings"] = ["local polish stopped before meeting its convergence locks"]
    if args.curve:
        stem, dot, ext = args.curve.rpartition(".")
        if not dot:
            stem, ext = args.curve, "csv"
        eff_f = float(eff)
        base = TestPolicy(eff_f, tuple(j * tau / int(n_tests) for j in range(1, int(n_tests) + 1)))
        opt = TestPolicy(eff_f, result.optimal_times + (tau,))
        write_curve_csv(f"{stem}.baseline.{ext}", sample_curve(spec, base))
        write_curve_csv(f"{stem}.optimized.{ext}", sample_curve(spec, opt))
    return out


def cmd_simulate(cfg: dict, args) -> dict:
    spec = _system_from(cfg)
    policy = _policy_from(cfg)
    sec = _section(cfg, "simulation", required=False)
    reps = args.replications if args.replications is not None else sec.get("replications")
    if reps is None:
        raise ConfigError("simulation.replications", "field missing")
    seed = args.seed if args.seed is not None else sec.get("seed")
    if seed is None:
        raise ConfigError("simulation.seed", "field missing")
    curve_samples = int(sec.get("curve_samples", 33 if args.curve else 0))
    try:
        config = SimConfig(spec, policy, int(reps), int(seed), curve_samples)
    except (TypeError, ValueError) as exc:
        raise ConfigError("simulation", str(exc)) from None
    result = simulate_system(config)
    if args.curve:
        curve = result.u_curve_hat
        if curve is None:
            curve = empirical_curve(
                SimConfig(spec, policy, int(reps), int(seed), curve_samples=33)
            )
        write_curve_csv(args.curve, curve)
    return {
        "pfd_avg_hat": result.pfd_avg_hat,
        "std_err": result.std_err,
        "replications": int(reps),
        "seed": int(seed),
        "backend": active_backend_name(),
    }


_COMMANDS = {
    "evaluate": cmd_evaluate,
    "estimate": cmd_estimate,
    "optimize": cmd_optimize,
    "simulate": cmd_simulate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sispfd",
        description="PFD of MooN safety systems under partial/full proof-test policies",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("evaluate", "exact or approximate PFD report for a configured policy"),
        ("estimate", "failure rate and test efficiency from observed counts"),
        ("optimize", "partial-test times minimizing the cycle-average PFD"),
        ("simulate", "Monte Carlo estimate of the cycle-average PFD"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--curve", help="write an unavailability curve CSV here")
        p.add_argument("--timestamp", action="store_true",
                       help="include a generated_at field in the report")
        if name == "evaluate":
            p.add_argument("--approx", action="store_true",
                           help="use the first-order approximations")
        if name == "estimate":
            p.add_argument("--then-evaluate", action="store_true", dest="then_evaluate",
                           help="evaluate the policy using the fitted parameters")
            p.add_argument("--level", type=float, help="confidence level (default 0.90)")
        if name == "simulate":
            p.add_argument("--seed", type=int, help="override simulation.seed")
            p.add_argument("--replications", type=int, help="override simulation.replications")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        report = _COMMANDS[args.command](cfg, args)
        if args.timestamp:
            report["generated_at"] = datetime.now(timezone.utc).isoformat()
        text = json.dumps(report, indent=2) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
