import numpy as np
import pytest

from errors import DomainError
from models import ExperimentPlan
from services.detection_engine import gaussian_quantile
from services.extremal_solver import solve_extremal
from services.monte_carlo_lab import (
    ALTERNATIVE_ARM,
    NULL_ARM,
    estimate_errors,
    replication_generator,
    simulate_observations,
)
from services.sequence_model import spectrum
from tests.conftest import make_config


def plan_for(config, **kwargs):
    kwargs.setdefault("replications", 400)
    kwargs.setdefault("seed", 42)
    return ExperimentPlan(config=config, **kwargs)


class TestStreams:
    def test_same_key_same_draws(self):
        a = replication_generator(42, NULL_ARM, 5).standard_normal(8)
        b = replication_generator(42, NULL_ARM, 5).standard_normal(8)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ_by_arm_and_replication(self):
        base = replication_generator(42, NULL_ARM, 5).standard_normal(8)
        assert not np.array_equal(base, replication_generator(42, ALTERNATIVE_ARM, 5).standard_normal(8))
        assert not np.array_equal(base, replication_generator(42, NULL_ARM, 6).standard_normal(8))
        assert not np.array_equal(base, replication_generator(43, NULL_ARM, 5).standard_normal(8))

    def test_seed_range(self):
        with pytest.raises(DomainError):
            replication_generator(-1, NULL_ARM, 0)
        with pytest.raises(DomainError):
            replication_generator(2 ** 64, NULL_ARM, 0)
        replication_generator(2 ** 64 - 1, NULL_ARM, 0)


class TestSimulateObservations:
    def test_shape_follows_multiplicity(self):
        config = make_config([0.0, 0.0], [1.0, 1.0], multiplicity=4)
        solution = solve_extremal(config, 0.5)
        y = simulate_observations(solution.indices, solution.theta_squared, config, 1, 0)
        assert y.shape == (solution.support_size, 4)

    def test_noiseless_model(self, worked_config):
        solution = solve_extremal(worked_config, 0.5)
        y = simulate_observations(solution.indices, solution.theta_squared, worked_config, 1, 0, epsilon=0.0)
        expected = spectrum(worked_config, solution.indices) * np.sqrt(solution.theta_squared)
        np.testing.assert_array_equal(y[:, 0], expected)

    def test_reproducible(self, worked_config):
        solution = solve_extremal(worked_config, 0.5)
        first = simulate_observations(solution.indices, solution.theta_squared, worked_config, 9, 3)
        second = simulate_observations(solution.indices, solution.theta_squared, worked_config, 9, 3)
        np.testing.assert_array_equal(first, second)

    def test_pure_noise_is_centered(self):
        config = make_config([0.0], [1.0], shape="sobolev_sum", epsilon=0.05)
        n = 100_000
        indices = np.arange(1, n + 1)[:, None]
        y = simulate_observations(indices, np.zeros(n), config, 2024, 0)
        scaled = y[:, 0] / config.epsilon
        assert abs(scaled.mean()) <= 3.0 / np.sqrt(n)
        assert scaled.var() == pytest.approx(1.0, abs=0.02)

    def test_rejects_misaligned_signal(self, worked_config):
        solution = solve_extremal(worked_config, 0.5)
        with pytest.raises(DomainError, match="align"):
            simulate_observations(solution.indices, solution.theta_squared[:-1], worked_config, 1, 0)

    def test_rejects_negative_epsilon(self, worked_config):
        solution = solve_extremal(worked_config, 0.5)
        with pytest.raises(DomainError):
            simulate_observations(solution.indices, solution.theta_squared, worked_config, 1, 0, epsilon=-1.0)


class TestEstimateErrors:
    def test_worker_count_does_not_change_results(self, worked_config):
        plan = plan_for(worked_config, radius=0.3, replications=600)
        serial = estimate_errors(plan, workers=1)
        threaded = estimate_errors(plan, workers=4)
        assert serial.model_dump() == threaded.model_dump()

    def test_null_moments(self, level_config):
        estimates = estimate_errors(plan_for(level_config, radius=0.01, replications=2000), workers=2)
        assert estimates.null_mean == pytest.approx(0.0, abs=0.1)
        assert estimates.null_variance == pytest.approx(1.0, abs=0.15)
        assert estimates.alternative_mean == pytest.approx(estimates.u_value, abs=0.1 + 0.05 * estimates.u_value)

    def test_standard_errors_need_enough_replications(self, worked_config):
        few = estimate_errors(plan_for(worked_config, radius=0.3, replications=50), workers=1)
        assert few.type1_se is None and few.type2_se is None
        many = estimate_errors(plan_for(worked_config, radius=0.3, replications=100), workers=1)
        assert many.type1_se is not None and many.type2_se is not None

    def test_reports_quantile_threshold(self, worked_config):
        estimates = estimate_errors(plan_for(worked_config, radius=0.3, replications=10), workers=1)
        assert estimates.threshold == pytest.approx(gaussian_quantile(0.05))
        assert estimates.radius == pytest.approx(0.3, rel=1e-8)

    def test_consistency_threshold_rule(self, worked_config):
        plan = plan_for(
            worked_config, target_u=8.0, replications=300, threshold_rule="consistency_cu", consistency_c=0.5
        )
        estimates = estimate_errors(plan, workers=1)
        assert estimates.threshold == pytest.approx(4.0, rel=1e-6)

    def test_plan_needs_one_alternative(self, worked_config):
        with pytest.raises(ValueError, match="exactly one"):
            ExperimentPlan(config=worked_config, replications=10, seed=0)
        with pytest.raises(ValueError, match="exactly one"):
            ExperimentPlan(config=worked_config, radius=0.3, target_u=1.0, replications=10, seed=0)

    def test_consistency_rule_needs_constant(self, worked_config):
        with pytest.raises(ValueError, match="consistency_c"):
            ExperimentPlan(
                config=worked_config, radius=0.3, replications=10, seed=0, threshold_rule="consistency_cu"
            )


@pytest.mark.slow
class TestErrorCriteria:
    def test_level_is_held(self, level_config):
        estimates = estimate_errors(plan_for(level_config, radius=1e-7, replications=10_000, seed=7))
        assert abs(estimates.type1_rate - 0.05) <= 0.0065

    def test_sharp_type2(self, tiny_noise_config):
        estimates = estimate_errors(plan_for(tiny_noise_config, target_u=2.0, replications=10_000, seed=11))
        assert estimates.u_value == pytest.approx(2.0, rel=1e-6)
        assert abs(estimates.type2_rate - estimates.predicted_type2) <= 0.05

    def test_small_u_is_undetectable(self, tiny_noise_config):
        estimates = estimate_errors(plan_for(tiny_noise_config, target_u=0.1, replications=4000, seed=5))
        assert estimates.type2_rate >= 0.9 * 0.95

    def test_large_u_is_detected(self, tiny_noise_config):
        estimates = estimate_errors(plan_for(tiny_noise_config, target_u=10.0, replications=4000, seed=5))
        assert estimates.type2_rate <= 0.01

    def test_type2_does_not_grow_with_signal(self, tiny_noise_config):
        rates = [
            estimate_errors(plan_for(tiny_noise_config, target_u=u, replications=2000, seed=13)).type2_rate
            for u in (0.5, 1.0, 2.0, 3.0, 4.5)
        ]
        assert all(later <= earlier for earlier, later in zip(rates, rates[1:]))

    def test_consistency_rule_drives_both_errors_down(self, tiny_noise_config):
        plan = plan_for(
            tiny_noise_config,
            target_u=12.0,
            replications=4000,
            seed=3,
            threshold_rule="consistency_cu",
            consistency_c=0.5,
        )
        estimates = estimate_errors(plan)
        assert estimates.type1_rate <= 0.01
        assert estimates.type2_rate <= 0.01
