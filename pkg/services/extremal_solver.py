"""
Exact finite-sum solution of the extremal problem

    minimize  sum m b_l^4 theta_l^4  over   sum m theta_l^2 = r^2,  sum m a_l^2 theta_l^2 = 1.

For a Lagrange level A the minimizer is theta_l^2 = z0^2 b_l^{-4} (1 - A a_l^2)_+,
so everything reduces to the three sums J0, J1, J2 over the finite support
{A a_l^2 < 1} and a scalar root-finding problem in A.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from config import (
    BRACKET_EXPANSION_FACTOR,
    GRID_POINTS,
    MAX_BRACKET_EXPANSIONS,
    RESIDUAL_RTOL,
    SOLVER_RTOL,
)
from errors import DomainError, SolverError
from models import ExtremalSolution, JTriple, ProblemConfig
from services.lattice import enumerate_downset
from services.sequence_model import (
    a_min_squared,
    inverse_spectrum_fourth,
    smoothness_squared,
    spectrum,
)

logger = logging.getLogger(__name__)

# keeps the upper probe strictly inside (0, 1/a_min^2)
_UPPER_SHRINK = 1.0 - 2.0 ** -30


def _fsum(values: np.ndarray) -> float:
    return math.fsum(values.tolist())


@dataclass(frozen=True)
class _SupportTerms:
    """Per-index arrays over the support of one Lagrange level A"""

    A: float
    indices: np.ndarray
    a_squared: np.ndarray
    b_inv4: np.ndarray
    slack: np.ndarray

    def j_triple(self, multiplicity: int) -> JTriple:
        weighted = self.b_inv4 * self.slack
        return JTriple(
            J0=multiplicity * _fsum(weighted * self.slack),
            J1=multiplicity * _fsum(weighted),
            J2=multiplicity * self.A * _fsum(self.a_squared * weighted),
        )


def enumerate_support(config: ProblemConfig, A: float) -> np.ndarray:
    """All multi-indices with A a_l^2 < 1, lexicographic, as an (n, d) array"""
    if not A > 0:
        raise DomainError(f"A must be > 0, got {A}")

    def inside(points: np.ndarray) -> np.ndarray:
        return A * smoothness_squared(config, points) < 1.0

    indices = enumerate_downset(config.dimension, inside, config.support_cap)
    logger.debug("support at A=%.6g holds %d indices", A, len(indices))
    return indices


def _support_terms(config: ProblemConfig, A: float) -> _SupportTerms:
    indices = enumerate_support(config, A)
    a_squared = smoothness_squared(config, indices)
    return _SupportTerms(
        A=A,
        indices=indices,
        a_squared=a_squared,
        b_inv4=inverse_spectrum_fourth(config, indices),
        slack=1.0 - A * a_squared,
    )


def compute_J(config: ProblemConfig, A: float) -> JTriple:
    """(J0, J1, J2) at Lagrange level A with the config's orthant multiplicity"""
    return _support_terms(config, A).j_triple(config.orthant_multiplicity)


def radius_squared_at(config: ProblemConfig, A: float) -> float:
    """r^2(A) = A J1 / J2"""
    j = compute_J(config, A)
    if j.J2 == 0:
        raise DomainError(f"empty support at A={A}")
    return A * j.J1 / j.J2


def u_at(config: ProblemConfig, A: float) -> float:
    """u(A) = A sqrt(J0 / 2) / (eps^2 J2)"""
    j = compute_J(config, A)
    if j.J2 == 0:
        raise DomainError(f"empty support at A={A}")
    return A * math.sqrt(j.J0 / 2.0) / (config.epsilon ** 2 * j.J2)


def _locate_root(
    objective: Callable[[float], float], upper: float, label: str, ftol: float = math.inf
) -> float:
    """
    Root of `objective` on (0, upper) where objective > 0 near `upper`.

    Walks the lower end down geometrically until the sign flips, scans a
    geometric grid for sign changes and bisects the unique bracket until it
    is narrower than SOLVER_RTOL and |objective| <= ftol at one of its ends.
    """
    hi = upper * _UPPER_SHRINK
    f_hi = objective(hi)
    if f_hi <= 0:
        raise SolverError(f"{label}: objective is not positive near the upper end", f"A={hi:.6g}")

    lo = hi
    for _ in range(MAX_BRACKET_EXPANSIONS):
        lo /= BRACKET_EXPANSION_FACTOR
        if objective(lo) < 0:
            break
    else:
        raise SolverError(f"{label}: no sign change found down to A={lo:.3g}")

    grid = np.geomspace(lo, hi, GRID_POINTS)
    values = np.array([objective(float(A)) for A in grid])
    exact = np.nonzero(values == 0)[0]
    signs = np.sign(values)
    brackets = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    # a grid point hitting zero counts as a root of its own
    if brackets.size + exact.size == 0:
        raise SolverError(f"{label}: no sign-change bracket on the scan grid")
    if brackets.size + exact.size > 1:
        raise SolverError(
            f"{label}: multiple sign-change brackets",
            ", ".join(
                [f"[{grid[k]:.6g}, {grid[k + 1]:.6g}]" for k in brackets]
                + [f"{grid[k]:.6g}" for k in exact]
            ),
        )
    if exact.size == 1:
        return float(grid[exact[0]])

    a, b = float(grid[brackets[0]]), float(grid[brackets[0] + 1])
    f_a, f_b = values[brackets[0]], values[brackets[0] + 1]
    logger.debug("%s: bracket [%.12g, %.12g]", label, a, b)
    while True:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        f_mid = objective(mid)
        if f_mid == 0:
            return mid
        if (f_mid < 0) == (f_a < 0):
            a, f_a = mid, f_mid
        else:
            b, f_b = mid, f_mid
        if b - a <= SOLVER_RTOL * b and min(abs(f_a), abs(f_b)) <= ftol:
            break
    return a if abs(f_a) <= abs(f_b) else b


def _solution_at(config: ProblemConfig, A: float) -> ExtremalSolution:
    terms = _support_terms(config, A)
    m = config.orthant_multiplicity
    j = terms.j_triple(m)
    if j.J2 == 0:
        raise DomainError(f"empty support at A={A}")

    z0_squared = A / j.J2
    theta_squared = z0_squared * terms.b_inv4 * terms.slack
    solution = ExtremalSolution(
        A=A,
        z0_squared=z0_squared,
        indices=terms.indices,
        multiplicity=m,
        b=spectrum(config, terms.indices),
        a_squared=terms.a_squared,
        theta_squared=theta_squared,
        j=j,
        r=math.sqrt(A * j.J1 / j.J2),
        u=z0_squared * math.sqrt(j.J0 / 2.0) / config.epsilon ** 2,
        epsilon=config.epsilon,
    )
    if solution.ellipsoid_residual > RESIDUAL_RTOL:
        raise SolverError(
            "ellipsoid constraint residual above tolerance",
            f"residual={solution.ellipsoid_residual:.3g}",
        )
    return solution


def _feasible_upper(config: ProblemConfig) -> float:
    return 1.0 / a_min_squared(config)


def solve_extremal(
    config: ProblemConfig, r: float, ellipsoid_radius: float = 1.0
) -> ExtremalSolution:
    """Least favourable signal at distance r inside the ellipsoid of radius `ellipsoid_radius`"""
    if not ellipsoid_radius > 0:
        raise DomainError(f"ellipsoid_radius must be > 0, got {ellipsoid_radius}")
    if ellipsoid_radius != 1.0:
        return rescale_solution(solve_extremal(config, r / ellipsoid_radius), ellipsoid_radius)
    if not r > 0:
        raise DomainError(f"radius must be > 0, got {r}")

    upper = _feasible_upper(config)
    if not r * r < upper:
        raise DomainError(
            "radius exceeds ellipsoid",
            f"r^2={r * r:.6g} must be below 1/a_min^2={upper:.6g}",
        )

    target = r * r

    def objective(A: float) -> float:
        return radius_squared_at(config, A) - target

    A = _locate_root(objective, upper, "solve_extremal", ftol=0.1 * RESIDUAL_RTOL * target)
    solution = _solution_at(config, A)
    # the solved radius may differ from the requested one only within tolerance
    if abs(solution.r ** 2 - target) > RESIDUAL_RTOL * target:
        raise SolverError(
            "radius constraint residual above tolerance",
            f"solved r={solution.r:.12g}, requested r={r:.12g}",
        )
    logger.info(
        "solved r=%.6g: A=%.6g support=%d u=%.6g", r, A, solution.support_size, solution.u
    )
    return solution


def max_attainable_u(config: ProblemConfig) -> float:
    """u when all mass sits on l = (1, ..., 1)"""
    origin = np.ones((1, config.dimension), dtype=np.int64)
    b = float(spectrum(config, origin)[0])
    a_squared = a_min_squared(config)
    return b * b / (math.sqrt(2.0 * config.orthant_multiplicity) * config.epsilon ** 2 * a_squared)


def solve_for_u(config: ProblemConfig, target_u: float) -> ExtremalSolution:
    """Extremal solution whose signal-to-noise u equals `target_u`"""
    if not target_u > 0:
        raise DomainError(f"target_u must be > 0, got {target_u}")
    u_max = max_attainable_u(config)
    if not target_u < u_max:
        raise DomainError(
            "target u exceeds the largest attainable value",
            f"target_u={target_u:.6g}, u_max={u_max:.6g}",
        )

    log_target = math.log(target_u)

    def objective(A: float) -> float:
        return math.log(u_at(config, A)) - log_target

    A = _locate_root(objective, _feasible_upper(config), "solve_for_u")
    solution = _solution_at(config, A)
    logger.info(
        "solved u=%.6g: A=%.6g r=%.6g support=%d", target_u, A, solution.r, solution.support_size
    )
    return solution


def rescale_solution(solution: ExtremalSolution, ellipsoid_radius: float) -> ExtremalSolution:
    """Map a unit-ellipsoid solution to the ellipsoid of radius R: theta^2 and u scale by R^2"""
    if not ellipsoid_radius > 0:
        raise DomainError(f"ellipsoid_radius must be > 0, got {ellipsoid_radius}")
    scale = ellipsoid_radius ** 2 / solution.ellipsoid_radius ** 2
    return solution.model_copy(
        update={
            "z0_squared": solution.z0_squared * scale,
            "theta_squared": solution.theta_squared * scale,
            "r": solution.r * math.sqrt(scale),
            "u": solution.u * scale,
            "ellipsoid_radius": ellipsoid_radius,
        }
    )
