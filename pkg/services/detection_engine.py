import logging
import math
from typing import Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import ndtr, ndtri

from errors import DomainError, MissingObservationError
from models import ExtremalSolution, FilterWeights, TestOutcome

logger = logging.getLogger(__name__)

Observation = Union[float, Sequence[float], np.ndarray]


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise DomainError("alpha out of (0,1)", f"alpha={alpha}")


def gaussian_cdf(x: float) -> float:
    """Standard Gaussian distribution function"""
    return float(ndtr(x))


def gaussian_quantile(alpha: float) -> float:
    """Upper alpha quantile H = Phi^{-1}(1 - alpha)"""
    _check_alpha(alpha)
    # ndtri(alpha) keeps full relative accuracy for small alpha
    return float(-ndtri(alpha))


def weights_from_signal(
    indices: np.ndarray, b: np.ndarray, theta_squared: np.ndarray, multiplicity: int = 1
) -> FilterWeights:
    """omega_l = b_l^2 theta_l^2 / sqrt(2 sum m b^4 theta^4)"""
    if len(indices) == 0:
        raise DomainError("filter weights need a nonempty support")
    if np.any(theta_squared < 0):
        raise DomainError("theta_squared entries must be >= 0")
    energy = b * b * theta_squared
    normalization = math.sqrt(2.0 * multiplicity * math.fsum((energy * energy).tolist()))
    if normalization == 0:
        raise DomainError("filter weights need a nonzero signal")
    logger.debug("filter over %d indices, normalization %.6g", len(indices), normalization)
    return FilterWeights(
        indices=indices,
        weights=energy / normalization,
        normalization=normalization,
        multiplicity=multiplicity,
    )


def filter_weights(solution: ExtremalSolution) -> FilterWeights:
    """Optimal filter for the least favourable signal of `solution`"""
    return weights_from_signal(
        solution.indices, solution.b, solution.theta_squared, solution.multiplicity
    )


def _centered_energy(value: Observation, epsilon: float, multiplicity: int) -> float:
    y = np.asarray(value, dtype=float)
    if y.ndim == 0:
        return multiplicity * (float(y) ** 2 - epsilon ** 2)
    if y.shape != (multiplicity,):
        raise DomainError(
            f"each observation needs {multiplicity} coordinates, got shape {y.shape}"
        )
    return math.fsum((y * y - epsilon ** 2).tolist())


def normalized_statistic(
    observations: Mapping[Tuple[int, ...], Observation], weights: FilterWeights, epsilon: float
) -> float:
    """Normalized statistic eps^-2 sum_l omega_l sum_i (y_{l,i}^2 - eps^2)"""
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    terms = []
    for row, omega in zip(weights.indices, weights.weights):
        key = tuple(int(c) for c in row)
        if key not in observations:
            raise MissingObservationError(f"missing observation for index {key}")
        terms.append(omega * _centered_energy(observations[key], epsilon, weights.multiplicity))
    return math.fsum(terms) / epsilon ** 2


def run_test(
    observations: Mapping[Tuple[int, ...], Observation],
    weights: FilterWeights,
    epsilon: float,
    threshold: Optional[float] = None,
    alpha: float = 0.05,
) -> TestOutcome:
    """Reject when the statistic exceeds `threshold` (default: the upper alpha Gaussian quantile)"""
    if threshold is None:
        threshold = gaussian_quantile(alpha)
    statistic = normalized_statistic(observations, weights, epsilon)
    return TestOutcome(statistic=statistic, threshold=threshold, reject=statistic > threshold)


def batch_statistic(observations: np.ndarray, weights: FilterWeights, epsilon: float) -> float:
    """Statistic for one replication stored as an (n, m) array aligned with the weight support"""
    centered = np.sum(observations * observations - epsilon ** 2, axis=1)
    return math.fsum((weights.weights * centered).tolist()) / epsilon ** 2


def predicted_type2(u: float, alpha: float) -> float:
    """Sharp type II error Phi(H - u)"""
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u}")
    return gaussian_cdf(gaussian_quantile(alpha) - u)


def consistency_threshold(u: float, c: float) -> float:
    """Threshold c u with c in (0,1); both error probabilities vanish as u grows"""
    if not 0 < c < 1:
        raise DomainError("consistency constant out of (0,1)", f"c={c}")
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u}")
    return c * u
