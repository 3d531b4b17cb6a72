"""Monte Carlo reference: determinism, backend parity, closed-form agreement."""

import math

import pytest

from sispfd import (
    SimConfig,
    SystemSpec,
    TestPolicy,
    available_backends,
    active_backend_name,
    empirical_curve,
    pfd_avg,
    simulate_observations,
    simulate_system,
    system_unavailability,
)
from conftest import CASE_TIMES, TAU

needs_both_backends = pytest.mark.skipif(
    len(available_backends()) < 2, reason="compiled kernel not built"
)


class TestSimConfig:
    def test_validation(self, case_spec, case_policy):
        with pytest.raises(ValueError):
            SimConfig(case_spec, case_policy, 0, 1)
        with pytest.raises(ValueError):
            SimConfig(case_spec, case_policy, 100, -1)
        with pytest.raises(ValueError):
            SimConfig(case_spec, case_policy, 100, 2**64)
        with pytest.raises(ValueError):
            SimConfig(case_spec, case_policy, 100, 1, curve_samples=1)
        SimConfig(case_spec, case_policy, 100, 2**64 - 1, curve_samples=2)

    def test_unknown_backend_rejected(self, case_spec, case_policy):
        with pytest.raises(ValueError, match="unknown backend"):
            simulate_system(SimConfig(case_spec, case_policy, 10, 1), backend="mc3")


def test_backend_registry():
    names = available_backends()
    assert "numpy" in names
    assert active_backend_name() in names


class TestDeterminism:
    def test_same_seed_same_result(self, case_spec, case_policy):
        cfg = SimConfig(case_spec, case_policy, 5000, 1234, curve_samples=5)
        a = simulate_system(cfg)
        b = simulate_system(cfg)
        assert a.pfd_avg_hat == b.pfd_avg_hat
        assert a.std_err == b.std_err
        assert a.u_curve_hat == b.u_curve_hat

    def test_different_seeds_differ(self, case_spec, case_policy):
        a = simulate_system(SimConfig(case_spec, case_policy, 5000, 1))
        b = simulate_system(SimConfig(case_spec, case_policy, 5000, 2))
        assert a.pfd_avg_hat != b.pfd_avg_hat

    def test_observation_counts_frozen(self):
        # Integer summaries are identical on every backend; this draw is
        # pinned as a regression anchor.
        pol = TestPolicy(0.42, CASE_TIMES)
        obs = simulate_observations(0.05 / TAU, 0.42, pol, 100_000, 20260825)
        assert obs.counts == (543, 527, 520, 3375)
        assert obs.components_observed == 100_000
        assert obs.policy is pol


@needs_both_backends
class TestBackendParity:
    def test_pfd_estimates_match(self, case_spec, case_policy):
        cfg = SimConfig(case_spec, case_policy, 20_000, 99)
        a = simulate_system(cfg, backend="numpy")
        b = simulate_system(cfg, backend="compiled")
        # Same draws; only the last bits of the float math may differ.
        assert a.pfd_avg_hat == pytest.approx(b.pfd_avg_hat, rel=1e-12)
        assert a.std_err == pytest.approx(b.std_err, rel=1e-9, abs=1e-15)

    def test_observation_counts_identical(self):
        pol = TestPolicy(0.7, CASE_TIMES)
        a = simulate_observations(2e-5, 0.7, pol, 50_000, 7, backend="numpy")
        b = simulate_observations(2e-5, 0.7, pol, 50_000, 7, backend="compiled")
        assert a.counts == b.counts

    def test_curves_identical(self, case_spec, case_policy):
        cfg = SimConfig(case_spec, case_policy, 10_000, 5, curve_samples=9)
        a = empirical_curve(cfg, backend="numpy")
        b = empirical_curve(cfg, backend="compiled")
        assert a == b


class TestAgainstClosedForm:
    def test_case_study_within_sampling_error(self, case_spec, case_policy):
        exact = pfd_avg(case_spec, case_policy)
        r = simulate_system(SimConfig(case_spec, case_policy, 20_000, 7))
        assert r.std_err > 0.0
        assert abs(r.pfd_avg_hat - exact) < 4.0 * r.std_err

    def test_zero_rate_never_fails(self, case_policy):
        spec = SystemSpec(2, 6, 0.0)
        r = simulate_system(SimConfig(spec, case_policy, 2000, 3, curve_samples=3))
        assert r.pfd_avg_hat == 0.0
        assert r.std_err == 0.0
        assert all(u == 0.0 for _, u in r.u_curve_hat)

    def test_single_replication_has_no_spread(self, case_spec, case_policy):
        r = simulate_system(SimConfig(case_spec, case_policy, 1, 42))
        assert r.std_err == 0.0

    def test_curve_tracks_unavailability(self, case_spec, case_policy):
        cfg = SimConfig(case_spec, case_policy, 50_000, 17, curve_samples=3)
        curve = empirical_curve(cfg)
        # Last sample is the left limit at the full test, the cycle's peak.
        t_end, u_end = curve[-1]
        assert t_end == TAU
        exact = system_unavailability(case_spec, case_policy, TAU)
        sigma = math.sqrt(exact * (1.0 - exact) / 50_000)
        assert abs(u_end - exact) < 4.0 * sigma

    def test_curve_drops_at_partial_tests(self):
        # Big enough rate that the sawtooth shows through sampling noise.
        spec = SystemSpec(1, 1, 0.5 / TAU)
        pol = TestPolicy(0.42, CASE_TIMES)
        curve = empirical_curve(SimConfig(spec, pol, 20_000, 11, curve_samples=5))
        ts = [t for t, _ in curve]
        k = ts.index(2190.0)
        left, right = curve[k][1], curve[k + 1][1]
        assert left > right > 0.0

    def test_curve_shape(self, case_spec, case_policy):
        curve = empirical_curve(SimConfig(case_spec, case_policy, 100, 1, curve_samples=4))
        assert len(curve) == 4 * 4
        assert curve[0] == (0.0, 0.0)
        for t_i in CASE_TIMES[:-1]:
            assert [t for t, _ in curve].count(t_i) == 2

    def test_curve_needs_enough_samples(self, case_spec, case_policy):
        with pytest.raises(ValueError):
            empirical_curve(SimConfig(case_spec, case_policy, 100, 1))


class TestObservationSampling:
    def test_zero_efficiency_blinds_partial_tests(self):
        pol = TestPolicy(0.0, CASE_TIMES)
        obs = simulate_observations(0.5 / TAU, 0.0, pol, 5000, 8)
        assert obs.counts[:-1] == (0, 0, 0)
        assert obs.counts[-1] > 0

    def test_full_efficiency_final_count_is_binomial(self):
        # With E=1 the closing test only sees failures born in its own
        # interval: expected fraction 1 - exp(-lam*T_n).
        lam, big_k = 0.5 / TAU, 30_000
        pol = TestPolicy(1.0, CASE_TIMES)
        obs = simulate_observations(lam, 1.0, pol, big_k, 13)
        p = -math.expm1(-lam * 2190.0)
        sigma = math.sqrt(p * (1.0 - p) * big_k)
        assert abs(obs.counts[-1] - big_k * p) < 4.0 * sigma

    def test_partial_share_grows_with_efficiency(self):
        pol = TestPolicy(0.42, CASE_TIMES)
        low = simulate_observations(0.3 / TAU, 0.1, pol, 20_000, 21)
        high = simulate_observations(0.3 / TAU, 0.9, pol, 20_000, 21)
        assert low.partial_test_failures < high.partial_test_failures

    def test_validation(self, case_policy):
        with pytest.raises(ValueError):
            simulate_observations(-1e-5, 0.5, case_policy, 10, 1)
        with pytest.raises(ValueError):
            simulate_observations(1e-5, 1.5, case_policy, 10, 1)
        with pytest.raises(ValueError):
            simulate_observations(1e-5, 0.5, case_policy, 0, 1)
        with pytest.raises(ValueError):
            simulate_observations(1e-5, 0.5, case_policy, 10, -1)


def test_curve_attached_when_requested(case_spec, case_policy):
    r = simulate_system(SimConfig(case_spec, case_policy, 500, 9, curve_samples=3))
    assert r.u_curve_hat is not None
    assert len(r.u_curve_hat) == 4 * 3
    r2 = simulate_system(SimConfig(case_spec, case_policy, 500, 9))
    assert r2.u_curve_hat is None
