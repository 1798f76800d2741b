"""
Coefficient sequences of the sequence-space model y_l = b_l theta_l + eps xi_l.

b_l is the singular value of the operator at multi-index l and a_l^2 the
weight of the smoothness ellipsoid sum a_l^2 theta_l^2 <= R^2.
"""
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from errors import InvalidConfigError
from models import ProblemConfig

IndexLike = Union[Sequence[int], np.ndarray]


def validate_config(raw: Union[ProblemConfig, Dict[str, Any]]) -> ProblemConfig:
    """Validate a raw mapping (or re-validate a config) into a ProblemConfig"""
    payload = raw.model_dump() if isinstance(raw, ProblemConfig) else raw
    try:
        return ProblemConfig.model_validate(payload)
    except ValidationError as exc:
        raise InvalidConfigError(describe_validation(exc)) from None


def describe_validation(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        field = ".".join(str(p) for p in err["loc"]) or "config"
        message = err["msg"].removeprefix("Value error, ")
        parts.append(f"{field}: {message}")
    return "; ".join(parts)


def as_index_array(config: ProblemConfig, indices: IndexLike) -> np.ndarray:
    """Coerce one index or a stack of indices to an (n, d) int64 array"""
    arr = np.asarray(indices)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != config.dimension:
        raise InvalidConfigError(
            f"index length must equal dimension {config.dimension}, got shape {np.shape(indices)}"
        )
    if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
        raise InvalidConfigError("index coordinates must be integers")
    arr = arr.astype(np.int64)
    if arr.size and arr.min() < 1:
        raise InvalidConfigError("index coordinates must be >= 1")
    return arr


def spectrum(config: ProblemConfig, indices: np.ndarray) -> np.ndarray:
    """b_l for each row of `indices`"""
    t = np.asarray(config.spectrum.degrees, dtype=float)
    l = indices.astype(float)
    if config.spectrum.kind == "mildly_ill_posed":
        return np.prod(l ** -t, axis=1)
    return np.exp(-(l @ t))


def inverse_spectrum_fourth(config: ProblemConfig, indices: np.ndarray) -> np.ndarray:
    """b_l^{-4}, computed without forming b_l"""
    t = np.asarray(config.spectrum.degrees, dtype=float)
    l = indices.astype(float)
    with np.errstate(over="ignore"):
        if config.spectrum.kind == "mildly_ill_posed":
            return np.prod(l ** (4.0 * t), axis=1)
        return np.exp(4.0 * (l @ t))


def smoothness_squared(config: ProblemConfig, indices: np.ndarray) -> np.ndarray:
    """a_l^2 for each row of `indices` (inf where it overflows)"""
    s = np.asarray(config.smoothness.exponents, dtype=float)
    l = indices.astype(float)
    shape = config.smoothness.shape
    with np.errstate(over="ignore"):
        if shape == "tensor_polynomial":
            return np.prod(l ** (2.0 * s), axis=1)
        if shape == "tensor_exponential":
            return np.exp(2.0 * (l @ s))
        if shape == "sobolev_sum":
            return np.sum(l ** (2.0 * s), axis=1)
        if shape == "sobolev_exponential_sum":
            return np.sum(np.exp(2.0 * l * s), axis=1)
        # sobolev_sum_power
        return np.sum(l, axis=1) ** (2.0 * s[0])


def coefficients(config: ProblemConfig, index: IndexLike) -> Tuple[float, float]:
    """(b_l, a_l^2) for a single multi-index"""
    arr = as_index_array(config, index)
    if arr.shape[0] != 1:
        raise InvalidConfigError("coefficients takes a single multi-index")
    return float(spectrum(config, arr)[0]), float(smoothness_squared(config, arr)[0])


def a_min_squared(config: ProblemConfig) -> float:
    """Smallest a_l^2, attained at l = (1, ..., 1)"""
    origin = np.ones((1, config.dimension), dtype=np.int64)
    return float(smoothness_squared(config, origin)[0])


def with_epsilon(config: ProblemConfig, epsilon: float) -> ProblemConfig:
    return validate_config({**config.model_dump(), "epsilon": epsilon})
