"""
Enumeration of finite down-sets of the positive integer lattice.

A down-set is described by a vectorized membership predicate that is
monotone in every coordinate: if a point is inside, every point below it
(coordinate-wise, all coordinates >= 1) is inside too.  Points come back
in lexicographic order so that sums over them are reproducible.
"""
import logging
from typing import Callable, Sequence

import numpy as np

from errors import SupportCapError

logger = logging.getLogger(__name__)

Predicate = Callable[[np.ndarray], np.ndarray]


def enumerate_downset(dimension: int, inside: Predicate, cap: int) -> np.ndarray:
    """Return every lattice point of the down-set as an (n, dimension) int64 array"""
    origin = np.ones((1, dimension), dtype=np.int64)
    if not bool(inside(origin)[0]):
        return np.empty((0, dimension), dtype=np.int64)

    points = origin
    for axis in range(dimension):
        extents = _axis_extents(points, axis, inside, cap)
        total = int(extents.sum())
        if total > cap:
            raise SupportCapError(cap, total)
        points = _expand(points, axis, extents)

    logger.debug("enumerated %d lattice points in dimension %d", len(points), dimension)
    # expanding axis by axis keeps rows in lexicographic order
    return points


def _axis_extents(points: np.ndarray, axis: int, inside: Predicate, cap: int) -> np.ndarray:
    # every row is inside with coordinate `axis` equal to 1
    lo = np.ones(len(points), dtype=np.int64)
    hi = np.full(len(points), 2, dtype=np.int64)

    # doubling until the probe leaves the set
    rows = np.arange(len(points))
    while rows.size:
        probe = points[rows].copy()
        probe[:, axis] = hi[rows]
        still = np.asarray(inside(probe), dtype=bool)
        grown = rows[still]
        lo[grown] = hi[grown]
        hi[grown] *= 2
        rows = grown
        if rows.size and int(lo[rows].max()) > cap:
            raise SupportCapError(cap, int(lo[rows].max()))

    # bisection with lo inside and hi outside
    rows = np.nonzero(hi - lo > 1)[0]
    while rows.size:
        mid = (lo[rows] + hi[rows]) // 2
        probe = points[rows].copy()
        probe[:, axis] = mid
        ok = np.asarray(inside(probe), dtype=bool)
        lo[rows[ok]] = mid[ok]
        hi[rows[~ok]] = mid[~ok]
        rows = rows[hi[rows] - lo[rows] > 1]

    return lo


def _expand(points: np.ndarray, axis: int, extents: np.ndarray) -> np.ndarray:
    expanded = np.repeat(points, extents, axis=0)
    starts = np.cumsum(extents) - extents
    expanded[:, axis] = np.arange(len(expanded)) - np.repeat(starts, extents) + 1
    return expanded


def power_product_ball(exponents: Sequence[float], radius: float) -> Predicate:
    """Membership in {l : prod l_j^{s_j} <= radius^{sum s_j}} (boundary included)"""
    s = np.asarray(exponents, dtype=float)
    bound = float(radius) ** float(s.sum())

    def inside(points: np.ndarray) -> np.ndarray:
        return np.prod(points.astype(float) ** s, axis=1) <= bound

    return inside
