import itertools

import numpy as np
import pytest

from errors import SupportCapError
from services.lattice import enumerate_downset, power_product_ball


def brute_force(dimension, inside, bound):
    grid = np.array(list(itertools.product(range(1, bound + 1), repeat=dimension)), dtype=np.int64)
    return grid[inside(grid)]


def test_hyperbolic_cross_count_and_order():
    inside = lambda p: p[:, 0] * p[:, 1] <= 6
    points = enumerate_downset(2, inside, cap=1000)
    assert len(points) == 14
    np.testing.assert_array_equal(points, brute_force(2, inside, 10))


@pytest.mark.parametrize("dimension", [1, 2, 3])
def test_matches_brute_force_ball(dimension):
    inside = lambda p: np.sum(p.astype(float) ** 2, axis=1) < 30.0
    points = enumerate_downset(dimension, inside, cap=10_000)
    np.testing.assert_array_equal(points, brute_force(dimension, inside, 6))


def test_lexicographic_order():
    inside = lambda p: np.sum(p, axis=1) <= 7
    points = enumerate_downset(3, inside, cap=10_000)
    keys = [tuple(row) for row in points]
    assert keys == sorted(keys)


def test_empty_when_origin_outside():
    points = enumerate_downset(2, lambda p: np.zeros(len(p), dtype=bool), cap=10)
    assert points.shape == (0, 2)


def test_cap_is_enforced_before_materializing():
    with pytest.raises(SupportCapError, match="support_cap=50"):
        enumerate_downset(1, lambda p: p[:, 0] <= 100, cap=50)


def test_cap_on_total_size():
    # each axis alone fits, the product does not
    with pytest.raises(SupportCapError, match="support_cap=30"):
        enumerate_downset(2, lambda p: np.max(p, axis=1) <= 10, cap=30)


def test_power_product_ball_includes_boundary():
    inside = power_product_ball([1.0], 7.0)
    points = enumerate_downset(1, inside, cap=100)
    assert points[:, 0].tolist() == list(range(1, 8))


def test_power_product_ball_two_dimensional():
    # l1 * l2^2 <= 2^3
    points = enumerate_downset(2, power_product_ball([1.0, 2.0], 2.0), cap=100)
    expected = {(l1, l2) for l1 in range(1, 9) for l2 in range(1, 3) if l1 * l2 * l2 <= 8}
    assert {tuple(p) for p in points.tolist()} == expected
