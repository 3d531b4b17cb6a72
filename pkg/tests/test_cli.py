"""End-to-end command-line tests driven through main(argv)."""

import copy
import json

import pytest

from sispfd import SystemSpec, TestPolicy, available_backends, pfd_avg, sample_curve
from sispfd.cli import ConfigError, main, parse_duration
from conftest import CASE_EFFICIENCY, CASE_LAMBDA, CASE_TIMES

BASE_CONFIG = {
    "system": {"m": 2, "n": 6, "failure_rate_per_hour": 6.1e-5},
    "policy": {"efficiency": 0.42, "test_times": ["3mo", "6mo", "9mo", "1y"]},
}


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseDuration:
    @pytest.mark.parametrize(
        "raw, hours",
        [
            ("3mo", 2190.0),
            ("6mo", 4380.0),
            ("1y", 8760.0),
            ("1.5y", 13140.0),
            ("24h", 24.0),
            ("12 h", 12.0),
            (8760, 8760.0),
            (2190.5, 2190.5),
        ],
    )
    def test_accepts(self, raw, hours):
        assert parse_duration(raw) == hours

    @pytest.mark.parametrize("raw", [True, None, "soon", "3weeks", "mo", {"h": 1}, [8760]])
    def test_rejects(self, raw):
        with pytest.raises(ConfigError):
            parse_duration(raw)

    def test_message_carries_path(self):
        with pytest.raises(ConfigError, match=r"policy\.test_times\[2\]"):
            parse_duration("soon", "policy.test_times[2]")


class TestEvaluate:
    def test_report_fields(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_CONFIG)
        code, out, err = run(capsys, "evaluate", "--config", cfg)
        assert code == 0 and err == ""
        report = json.loads(out)
        spec = SystemSpec(2, 6, CASE_LAMBDA)
        policy = TestPolicy(CASE_EFFICIENCY, CASE_TIMES)
        # json round-trips floats exactly, so this is bitwise.
        assert report["pfd_avg"] == pfd_avg(spec, policy)
        assert len(report["pfd_per_interval"]) == 4
        assert report["t_u_max"] == 8760.0
        assert report["u_max"] > report["pfd_avg"]
        assert report["sil_band"] == "SIL2"
        assert report["sil_below_scale"] is False
        assert report["approximation_used"] is False
        assert "generated_at" not in report

    def test_unit_strings_equal_plain_hours(self, tmp_path, capsys):
        numeric = copy.deepcopy(BASE_CONFIG)
        numeric["policy"]["test_times"] = [2190, 4380, 6570, 8760]
        _, out_a, _ = run(capsys, "evaluate", "--config", write_config(tmp_path, BASE_CONFIG))
        _, out_b, _ = run(
            capsys, "evaluate", "--config", write_config(tmp_path, numeric, "n.json")
        )
        assert out_a == out_b

    # The case study sits far outside the approximation domain, so the
    # evaluator is expected to warn; the command still succeeds.
    @pytest.mark.filterwarnings("ignore::sispfd.ApproximationDomainWarning")
    def test_approx_flag(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_CONFIG)
        _, exact_out, _ = run(capsys, "evaluate", "--config", cfg)
        code, out, _ = run(capsys, "evaluate", "--config", cfg, "--approx")
        assert code == 0
        report = json.loads(out)
        assert report["approximation_used"] is True
        assert report["pfd_avg"] != json.loads(exact_out)["pfd_avg"]

    def test_out_file_matches_stdout(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_CONFIG)
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, "evaluate", "--config", cfg, "--out", str(target))
        assert code == 0 and out == ""
        _, stdout_text, _ = run(capsys, "evaluate", "--config", cfg)
        assert target.read_text(encoding="utf-8") == stdout_text

    def test_curve_csv_round_trips(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_CONFIG)
        target = tmp_path / "curve.csv"
        code, _, _ = run(capsys, "evaluate", "--config", cfg, "--curve", str(target))
        assert code == 0
        lines = target.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t_hours,unavailability"
        assert lines[1] == "0.0,0.0"
        assert len(lines) == 1 + 4 * 33
        parsed = [tuple(float(f) for f in line.split(",")) for line in lines[1:]]
        expected = sample_curve(SystemSpec(2, 6, CASE_LAMBDA), TestPolicy(0.42, CASE_TIMES))
        assert parsed == list(expected)

    def test_timestamp_flag(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_CONFIG)
        _, out, _ = run(capsys, "evaluate", "--config", cfg, "--timestamp")
        assert "generated_at" in json.loads(out)


class TestEstimate:
    CONFIG = {
        **BASE_CONFIG,
        "observations": {"counts": [5, 6, 5, 35], "components_observed": 96},
    }

    def test_fitted_values(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.CONFIG)
        code, out, _ = run(capsys, "estimate", "--config", cfg)
        assert code == 0
        report = json.loads(out)
        assert report["lambda_hat"] == 6.064497716894977e-05
        assert report["lambda_ci"] == [5.050737744603967e-05, 7.061354998139899e-05]
        assert report["e_hat"] == 0.4183006535947712
        assert report["e_hat_raw"] == report["e_hat"]
        assert report["e_ci"] == [0.2769252126789208, 0.5823044882966841]
        assert report["level"] == 0.90
        assert any("first-order" in w for w in report["warnings"])

    def test_then_evaluate_chains(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.CONFIG)
        _, out, _ = run(capsys, "estimate", "--config", cfg, "--then-evaluate")
        report = json.loads(out)
        assert report["evaluation"]["pfd_avg"] == 0.0020267956952664257
        assert report["evaluation"]["sil_band"] == "SIL2"

    def test_level_override_widens_interval(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.CONFIG)
        _, out90, _ = run(capsys, "estimate", "--config", cfg)
        _, out99, _ = run(capsys, "estimate", "--config", cfg, "--level", "0.99")
        lo90, hi90 = json.loads(out90)["lambda_ci"]
        report = json.loads(out99)
        lo99, hi99 = report["lambda_ci"]
        assert report["level"] == 0.99
        assert lo99 < lo90 and hi99 > hi90

    def test_level_from_config_section(self, tmp_path, capsys):
        data = {**self.CONFIG, "estimation": {"level": 0.99}}
        _, out, _ = run(capsys, "estimate", "--config", write_config(tmp_path, data))
        assert json.loads(out)["level"] == 0.99

    def test_no_failures_skips_evaluation(self, tmp_path, capsys):
        data = copy.deepcopy(self.CONFIG)
        data["observations"]["counts"] = [0, 0, 0, 0]
        cfg = write_config(tmp_path, data)
        code, out, _ = run(capsys, "estimate", "--config", cfg, "--then-evaluate")
        assert code == 0
        report = json.loads(out)
        assert report["e_hat"] is None
        assert "evaluation" not in report
        assert any("skipped" in w for w in report["warnings"])


class TestOptimize:
    SECTION_CONFIG = {
        "system": BASE_CONFIG["system"],
        "optimize": {"n_tests": 4, "tau": "1y", "efficiency": 0.42},
    }

    def test_finds_case_optimum(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.SECTION_CONFIG)
        code, out, _ = run(capsys, "optimize", "--config", cfg)
        assert code == 0
        report = json.loads(out)
        times = report["optimal_times_hours"]
        assert times == pytest.approx(
            [3523.6218831016395, 5750.089996396094, 7407.3374065363005], rel=1e-9
        )
        assert report["pfd_avg_opt"] == pytest.approx(0.0018665284959928918, rel=1e-9)
        assert report["pfd_avg_baseline"] == pytest.approx(0.0020582301262106473, rel=1e-13)
        assert report["converged"] is True
        assert report["optimal_times_months"] == [t / 730.0 for t in times]
        assert "warnings" not in report

    def test_policy_section_fallback(self, tmp_path, capsys):
        _, out_a, _ = run(
            capsys, "optimize", "--config", write_config(tmp_path, self.SECTION_CONFIG)
        )
        fallback = {"system": BASE_CONFIG["system"], "policy": BASE_CONFIG["policy"]}
        _, out_b, _ = run(
            capsys, "optimize", "--config", write_config(tmp_path, fallback, "f.json")
        )
        assert out_a == out_b

    def test_curve_pair_written(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.SECTION_CONFIG)
        target = tmp_path / "curves.csv"
        code, _, _ = run(capsys, "optimize", "--config", cfg, "--curve", str(target))
        assert code == 0
        for suffix in ("baseline", "optimized"):
            path = tmp_path / f"curves.{suffix}.csv"
            lines = path.read_text(encoding="utf-8").splitlines()
            assert lines[0] == "t_hours,unavailability"
            assert len(lines) == 1 + 4 * 33
            assert lines[-1].split(",")[0] == "8760.0"

    def test_missing_efficiency(self, tmp_path, capsys):
        data = {"system": BASE_CONFIG["system"], "optimize": {"n_tests": 4, "tau": "1y"}}
        code, _, err = run(capsys, "optimize", "--config", write_config(tmp_path, data))
        assert code == 2
        assert "optimize.efficiency" in err


class TestSimulate:
    CONFIG = {**BASE_CONFIG, "simulation": {"replications": 2000, "seed": 5}}

    def test_deterministic_output(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.CONFIG)
        code, out_a, _ = run(capsys, "simulate", "--config", cfg)
        _, out_b, _ = run(capsys, "simulate", "--config", cfg)
        assert code == 0
        assert out_a == out_b
        report = json.loads(out_a)
        assert report["replications"] == 2000
        assert report["seed"] == 5
        assert report["backend"] in available_backends()
        assert report["std_err"] > 0.0

    def test_cli_overrides_config(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.CONFIG)
        _, base, _ = run(capsys, "simulate", "--config", cfg)
        _, out, _ = run(capsys, "simulate", "--config", cfg, "--seed", "9")
        report = json.loads(out)
        assert report["seed"] == 9
        assert report["pfd_avg_hat"] != json.loads(base)["pfd_avg_hat"]
        _, out2, _ = run(capsys, "simulate", "--config", cfg, "--replications", "500")
        assert json.loads(out2)["replications"] == 500

    def test_curve_written(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.CONFIG)
        target = tmp_path / "mc.csv"
        code, _, _ = run(capsys, "simulate", "--config", cfg, "--curve", str(target))
        assert code == 0
        lines = target.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t_hours,unavailability"
        assert len(lines) == 1 + 4 * 33


class TestErrorPaths:
    def test_missing_config_file(self, tmp_path, capsys):
        code, out, err = run(capsys, "evaluate", "--config", str(tmp_path / "nope.json"))
        assert code == 2 and out == ""
        assert err.startswith("config error:")

    def test_invalid_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{nope", encoding="utf-8")
        code, _, err = run(capsys, "evaluate", "--config", str(path))
        assert code == 2
        assert "invalid JSON" in err

    def test_top_level_not_object(self, tmp_path, capsys):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        code, _, err = run(capsys, "evaluate", "--config", str(path))
        assert code == 2

    def test_missing_section_is_located(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"policy": BASE_CONFIG["policy"]})
        code, _, err = run(capsys, "evaluate", "--config", cfg)
        assert code == 2
        assert "system: section missing" in err

    def test_missing_field_is_located(self, tmp_path, capsys):
        data = {"system": {"m": 2, "n": 6}, "policy": BASE_CONFIG["policy"]}
        code, _, err = run(capsys, "evaluate", "--config", write_config(tmp_path, data))
        assert code == 2
        assert "system.failure_rate_per_hour" in err

    def test_domain_error_becomes_config_error(self, tmp_path, capsys):
        data = copy.deepcopy(BASE_CONFIG)
        data["system"]["m"] = 7
        code, _, err = run(capsys, "evaluate", "--config", write_config(tmp_path, data))
        assert code == 2
        assert "system:" in err

    def test_empty_test_times(self, tmp_path, capsys):
        data = copy.deepcopy(BASE_CONFIG)
        data["policy"]["test_times"] = []
        code, _, err = run(capsys, "evaluate", "--config", write_config(tmp_path, data))
        assert code == 2
        assert "policy.test_times" in err

    def test_internal_error_exit_code(self, tmp_path, capsys, monkeypatch):
        def boom(*args, **kwargs):
            raise RuntimeError("kaput")

        monkeypatch.setattr("sispfd.cli.evaluate_policy", boom)
        cfg = write_config(tmp_path, BASE_CONFIG)
        code, _, err = run(capsys, "evaluate", "--config", cfg)
        assert code == 3
        assert err.startswith("internal error: RuntimeError")


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "sispfd" in capsys.readouterr().out
