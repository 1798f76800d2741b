import math

import numpy as np
import pytest

from config import GRID_POINTS
from errors import DomainError, SolverError, SupportCapError
from services.extremal_solver import (
    _locate_root,
    compute_J,
    enumerate_support,
    max_attainable_u,
    radius_squared_at,
    rescale_solution,
    solve_extremal,
    solve_for_u,
)
from services.sequence_model import a_min_squared
from tests.conftest import WORKED_RADIUS, make_config, random_configs


class TestSupport:
    def test_worked_support(self, worked_config):
        assert enumerate_support(worked_config, 1.0 / 9.0).tolist() == [[1], [2]]

    def test_hyperbolic_support(self):
        config = make_config([0.0, 0.0], [1.0, 1.0])
        assert enumerate_support(config, 0.2).tolist() == [[1, 1], [1, 2], [2, 1]]

    def test_empty_support_above_one_over_amin(self, worked_config):
        assert len(enumerate_support(worked_config, 1.0)) == 0
        j = compute_J(worked_config, 2.0)
        assert (j.J0, j.J1, j.J2) == (0.0, 0.0, 0.0)

    def test_nonpositive_A(self, worked_config):
        with pytest.raises(DomainError):
            enumerate_support(worked_config, 0.0)

    def test_support_cap(self):
        config = make_config([0.0], [1.0], shape="sobolev_sum", support_cap=10)
        with pytest.raises(SupportCapError, match="support_cap=10"):
            enumerate_support(config, 1e-4)


class TestJSums:
    def test_worked_values(self, worked_config):
        j = compute_J(worked_config, 1.0 / 9.0)
        assert j.J0 == pytest.approx(89.0 / 81.0, rel=1e-14)
        assert j.J1 == pytest.approx(13.0 / 9.0, rel=1e-14)
        assert j.J2 == pytest.approx(28.0 / 81.0, rel=1e-14)

    def test_orthant_multiplicity_doubles(self):
        config = make_config([0.0], [1.0], shape="sobolev_sum", multiplicity=2)
        j = compute_J(config, 1.0 / 9.0)
        assert j.J0 == pytest.approx(178.0 / 81.0, rel=1e-14)
        assert j.J1 == pytest.approx(26.0 / 9.0, rel=1e-14)
        assert j.J2 == pytest.approx(56.0 / 81.0, rel=1e-14)

    def test_identity_on_random_configs(self):
        configs, rng = random_configs(50)
        for config in configs:
            A = float(rng.uniform(0.002, 0.9)) / a_min_squared(config)
            j = compute_J(config, A)
            assert j.identity_residual <= 1e-12 * max(1.0, j.J1)


class TestSolveExtremal:
    def test_worked_solution(self, worked_config):
        solution = solve_extremal(worked_config, WORKED_RADIUS)
        assert solution.A == pytest.approx(1.0 / 9.0, rel=1e-8)
        assert solution.z0_squared == pytest.approx(9.0 / 28.0, rel=1e-8)
        np.testing.assert_allclose(solution.theta_squared[:2], [2.0 / 7.0, 5.0 / 28.0], rtol=1e-8)
        # an index entering at the kink carries no mass
        assert np.all(solution.theta_squared[2:] <= 1e-9)
        expected_u = (9.0 / 28.0) * math.sqrt(89.0 / 162.0) / 0.01
        assert solution.u == pytest.approx(expected_u, rel=1e-8)
        assert solution.u == pytest.approx(23.82, abs=0.01)

    def test_constraints_on_random_configs(self):
        configs, rng = random_configs(50, seed=7)
        for config in configs:
            r = math.sqrt(float(rng.uniform(0.05, 0.9)) / a_min_squared(config))
            solution = solve_extremal(config, r)
            assert solution.r == pytest.approx(r, rel=1e-8)
            assert solution.radius_residual <= 1e-8
            assert solution.ellipsoid_residual <= 1e-8
            A = solution.A
            expected = solution.z0_squared * (solution.b ** -4.0) * (1.0 - A * solution.a_squared)
            np.testing.assert_allclose(solution.theta_squared, expected, rtol=1e-12)

    def test_infeasible_radius(self, worked_config):
        with pytest.raises(DomainError, match="radius exceeds ellipsoid"):
            solve_extremal(worked_config, 1.0)

    def test_boundary_concentrates_on_origin(self, worked_config):
        solution = solve_extremal(worked_config, math.sqrt(1.0 - 1e-6))
        share = solution.theta_squared[0] / solution.theta_squared.sum()
        assert share > 0.999

    def test_cap_propagates(self):
        config = make_config([0.0], [1.0], shape="sobolev_sum", support_cap=10)
        with pytest.raises(SupportCapError):
            solve_extremal(config, 0.01)

    @pytest.mark.parametrize("R", [0.5, 2.0])
    def test_ellipsoid_radius_rescaling(self, worked_config, R):
        r = 0.3
        base = solve_extremal(worked_config, r / R)
        scaled = solve_extremal(worked_config, r, ellipsoid_radius=R)
        np.testing.assert_allclose(scaled.theta_squared, base.theta_squared * R ** 2, rtol=1e-12)
        assert scaled.u == pytest.approx(base.u * R ** 2, rel=1e-12)
        assert scaled.r == pytest.approx(r, rel=1e-8)
        assert scaled.ellipsoid_residual <= 1e-8
        assert float(np.sum(scaled.a_squared * scaled.theta_squared)) == pytest.approx(R ** 2, rel=1e-8)

    def test_rescale_round_trip(self, worked_config):
        solution = solve_extremal(worked_config, 0.4)
        back = rescale_solution(rescale_solution(solution, 3.0), 1.0)
        assert back.u == pytest.approx(solution.u, rel=1e-14)
        assert back.ellipsoid_radius == 1.0

    def test_multiplicity_invariance(self):
        single = make_config([1.0, 0.25], [1.0, 1.0], epsilon=0.01)
        orthants = make_config([1.0, 0.25], [1.0, 1.0], epsilon=0.01, multiplicity=4)
        a = solve_extremal(single, 0.2)
        b = solve_extremal(orthants, 0.2)
        assert a.A == b.A
        assert a.u / b.u == pytest.approx(2.0, rel=1e-12)


class TestSolveForU:
    def test_hits_target(self, worked_config):
        solution = solve_for_u(worked_config, 2.0)
        assert solution.u == pytest.approx(2.0, rel=1e-8)
        again = solve_extremal(worked_config, solution.r)
        assert again.u == pytest.approx(2.0, rel=1e-6)

    def test_radius_grows_with_target(self, worked_config):
        radii = [solve_for_u(worked_config, u).r for u in (0.5, 1.0, 2.0, 4.0)]
        assert radii == sorted(radii)

    def test_target_above_maximum(self, worked_config):
        assert max_attainable_u(worked_config) == pytest.approx(1.0 / (math.sqrt(2.0) * 0.01))
        with pytest.raises(DomainError, match="largest attainable"):
            solve_for_u(worked_config, 100.0)


class TestRootLocation:
    def test_radius_map_limits(self, worked_config):
        assert radius_squared_at(worked_config, 0.9) == pytest.approx(1.0)
        assert radius_squared_at(worked_config, 1e-4) < 1e-3

    def test_multiple_brackets_reported(self):
        cubic = lambda A: (A - 0.2) * (A - 0.5) * (A - 0.8)
        with pytest.raises(SolverError, match="multiple sign-change brackets"):
            _locate_root(cubic, 1.0, "cubic")

    def test_no_sign_change_reported(self):
        with pytest.raises(SolverError, match="no sign change"):
            _locate_root(lambda A: 1.0, 1.0, "constant")

    def test_single_root(self):
        root = _locate_root(lambda A: A - 0.3, 1.0, "linear")
        assert root == pytest.approx(0.3, rel=1e-10)

    def test_zero_on_grid_still_counts_other_brackets(self):
        hi = 1.0 - 2.0 ** -30
        grid = np.geomspace(hi / 4.0, hi, GRID_POINTS)

        def objective(A):
            if A == grid[10]:
                return 0.0
            if A < grid[5] or grid[10] < A < grid[20]:
                return -1.0
            return 1.0

        with pytest.raises(SolverError, match="multiple sign-change brackets"):
            _locate_root(objective, 1.0, "stepped")

    def test_single_zero_on_grid_is_the_root(self):
        hi = 1.0 - 2.0 ** -30
        grid = np.geomspace(hi / 4.0, hi, GRID_POINTS)

        def objective(A):
            if A == grid[10]:
                return 0.0
            return -1.0 if A < grid[10] else 1.0

        assert _locate_root(objective, 1.0, "step") == grid[10]
