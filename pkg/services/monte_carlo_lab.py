"""
Monte Carlo estimation of the type I and type II errors of the filter test.

Every (arm, replication) pair owns its own counter-based Philox stream, so
the estimates do not depend on how replications are split across workers.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from config import DEFAULT_THREADS, MIN_REPORTED_REPLICATIONS, REPLICATION_CHUNK
from errors import DomainError
from models import ErrorEstimates, ExperimentPlan, ExtremalSolution, FilterWeights, ProblemConfig
from services.detection_engine import (
    batch_statistic,
    consistency_threshold,
    filter_weights,
    gaussian_quantile,
    predicted_type2,
)
from services.extremal_solver import solve_extremal, solve_for_u
from services.sequence_model import spectrum

logger = logging.getLogger(__name__)

NULL_ARM = 0
ALTERNATIVE_ARM = 1


def replication_generator(seed: int, arm: int, replication_index: int) -> np.random.Generator:
    """Independent stream for one replication of one arm"""
    if not 0 <= seed < 2 ** 64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if replication_index < 0:
        raise DomainError(f"replication_index must be >= 0, got {replication_index}")
    sequence = np.random.SeedSequence(seed, spawn_key=(arm, replication_index))
    return np.random.Generator(np.random.Philox(sequence))


def simulate_observations(
    indices: np.ndarray,
    theta_squared: np.ndarray,
    config: ProblemConfig,
    seed: int,
    replication_index: int,
    arm: int = NULL_ARM,
    epsilon: Optional[float] = None,
) -> np.ndarray:
    """
    Draw y_l = b_l sqrt(theta_l^2) + eps xi_l over the given support.

    Returns an (n, m) array: each index carries m independent coordinates.
    `epsilon` overrides config.epsilon and may be 0 (noiseless model).
    """
    theta_squared = np.asarray(theta_squared, dtype=float)
    if theta_squared.shape != (len(indices),):
        raise DomainError("theta_squared must align with the support indices")
    if np.any(theta_squared < 0):
        raise DomainError("theta_squared entries must be >= 0")
    eps = config.epsilon if epsilon is None else epsilon
    if eps < 0:
        raise DomainError(f"epsilon must be >= 0, got {eps}")

    m = config.orthant_multiplicity
    signal = spectrum(config, indices) * np.sqrt(theta_squared)
    return _draw(signal, eps, m, seed, arm, replication_index)


def _draw(signal: np.ndarray, epsilon: float, m: int, seed: int, arm: int, rep: int) -> np.ndarray:
    noise = replication_generator(seed, arm, rep).standard_normal((len(signal), m))
    return signal[:, None] + epsilon * noise


class ReplicationRunner:
    """Runs the replications of one arm, optionally on a thread pool"""

    def __init__(self, solution: ExtremalSolution, weights: FilterWeights, config: ProblemConfig, seed: int):
        self.solution = solution
        self.weights = weights
        self.config = config
        self.seed = seed

    def _chunk(self, arm: int, signal: np.ndarray, start: int, stop: int) -> np.ndarray:
        eps, m = self.config.epsilon, self.config.orthant_multiplicity
        out = np.empty(stop - start)
        for k, rep in enumerate(range(start, stop)):
            y = _draw(signal, eps, m, self.seed, arm, rep)
            out[k] = batch_statistic(y, self.weights, eps)
        return out

    def statistics(self, arm: int, replications: int, workers: int = 1) -> np.ndarray:
        """Statistic of every replication, ordered by replication index"""
        if arm == NULL_ARM:
            signal = np.zeros(self.solution.support_size)
        else:
            signal = self.solution.b * np.sqrt(self.solution.theta_squared)
        bounds = [
            (start, min(start + REPLICATION_CHUNK, replications))
            for start in range(0, replications, REPLICATION_CHUNK)
        ]
        if workers <= 1:
            parts: List[np.ndarray] = [self._chunk(arm, signal, a, b) for a, b in bounds]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(lambda ab: self._chunk(arm, signal, *ab), bounds))
        logger.debug("arm %d: %d replications in %d chunks", arm, replications, len(bounds))
        return np.concatenate(parts)


def _standard_error(rate: float, replications: int) -> Optional[float]:
    if replications < MIN_REPORTED_REPLICATIONS:
        return None
    return math.sqrt(rate * (1.0 - rate) / replications)


def _moments(values: np.ndarray):
    mean = math.fsum(values.tolist()) / len(values)
    variance = float(np.var(values, ddof=1)) if len(values) > 1 else 0.0
    return mean, variance


def estimate_errors(plan: ExperimentPlan, workers: Optional[int] = None) -> ErrorEstimates:
    """Solve the extremal problem once and estimate both error probabilities"""
    config = plan.config
    if plan.radius is not None:
        solution = solve_extremal(config, plan.radius)
    else:
        solution = solve_for_u(config, plan.target_u)
    weights = filter_weights(solution)

    if plan.threshold_rule == "consistency_cu":
        threshold = consistency_threshold(solution.u, plan.consistency_c)
    else:
        threshold = gaussian_quantile(config.alpha)

    runner = ReplicationRunner(solution, weights, config, plan.seed)
    workers = DEFAULT_THREADS if workers is None else workers
    n = plan.replications
    null_stats = runner.statistics(NULL_ARM, n, workers)
    alt_stats = runner.statistics(ALTERNATIVE_ARM, n, workers)

    # integer tallies are independent of scheduling
    type1 = int(np.count_nonzero(null_stats > threshold)) / n
    type2 = 1.0 - int(np.count_nonzero(alt_stats > threshold)) / n
    null_mean, null_variance = _moments(null_stats)
    alt_mean, alt_variance = _moments(alt_stats)
    logger.info(
        "N=%d u=%.4g: type1=%.4f type2=%.4f (support %d)",
        n, solution.u, type1, type2, solution.support_size,
    )

    return ErrorEstimates(
        alpha=config.alpha,
        radius=solution.r,
        u_value=solution.u,
        threshold=threshold,
        replications=n,
        seed=plan.seed,
        type1_rate=type1,
        type2_rate=type2,
        type1_se=_standard_error(type1, n),
        type2_se=_standard_error(type2, n),
        predicted_type2=predicted_type2(solution.u, config.alpha),
        null_mean=null_mean,
        null_variance=null_variance,
        alternative_mean=alt_mean,
        alternative_variance=alt_variance,
        support_size=solution.support_size,
    )
