from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import SUPPORT_CAP

SpectrumKind = Literal["mildly_ill_posed", "severely_ill_posed"]
SmoothnessShape = Literal[
    "tensor_polynomial",
    "tensor_exponential",
    "sobolev_sum",
    "sobolev_exponential_sum",
    "sobolev_sum_power",
]
RegimeKind = Literal[
    "tensor_mild_ordinary",
    "tensor_mild_supersmooth",
    "tensor_severe_supersmooth",
    "tensor_severe_ordinary",
    "sobolev_mild",
    "sobolev_severe",
]
RateScale = Literal["power", "parametric_log", "log"]
ThresholdRule = Literal["quantile_alpha", "consistency_cu"]


# Problem definition models
class SpectrumSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: SpectrumKind
    degrees: Tuple[float, ...]

    @field_validator("degrees")
    @classmethod
    def _nonnegative(cls, value):
        if len(value) == 0:
            raise ValueError("degrees must not be empty")
        if any(not np.isfinite(t) or t < 0 for t in value):
            raise ValueError("degrees must be finite and >= 0")
        return value


class SmoothnessSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    shape: SmoothnessShape
    exponents: Tuple[float, ...]

    @field_validator("exponents")
    @classmethod
    def _positive(cls, value):
        if len(value) == 0:
            raise ValueError("exponents must not be empty")
        if any(not np.isfinite(s) or s <= 0 for s in value):
            raise ValueError("exponents must be finite and > 0")
        return value

    @model_validator(mode="after")
    def _common_exponent(self):
        if self.shape == "sobolev_sum_power" and len(set(self.exponents)) > 1:
            raise ValueError("sobolev_sum_power needs a common exponent s")
        return self


class ProblemConfig(BaseModel):
    """One testing problem: operator spectrum, smoothness class, noise level and test level"""

    model_config = ConfigDict(frozen=True)

    dimension: int = Field(ge=1)
    spectrum: SpectrumSpec
    smoothness: SmoothnessSpec
    epsilon: float
    alpha: float = 0.05
    orthant_multiplicity: int = 1
    support_cap: int = Field(default=SUPPORT_CAP, ge=1)

    @field_validator("epsilon")
    @classmethod
    def _epsilon_positive(cls, value):
        if not np.isfinite(value) or value <= 0:
            raise ValueError("epsilon must be > 0")
        return value

    @field_validator("alpha")
    @classmethod
    def _alpha_open_unit(cls, value):
        if not 0 < value < 1:
            raise ValueError("alpha out of (0,1)")
        return value

    @model_validator(mode="after")
    def _dimensions_agree(self):
        if len(self.spectrum.degrees) != self.dimension:
            raise ValueError(
                f"dimension mismatch: spectrum.degrees has {len(self.spectrum.degrees)} "
                f"entries, dimension is {self.dimension}"
            )
        if len(self.smoothness.exponents) != self.dimension:
            raise ValueError(
                f"dimension mismatch: smoothness.exponents has {len(self.smoothness.exponents)} "
                f"entries, dimension is {self.dimension}"
            )
        if self.orthant_multiplicity not in (1, 2 ** self.dimension):
            raise ValueError(
                f"orthant_multiplicity must be 1 or 2^d = {2 ** self.dimension}"
            )
        return self

    @property
    def multiplicity_convention(self) -> str:
        return "1" if self.orthant_multiplicity == 1 else "2^d"


# Extremal problem models
class JTriple(BaseModel):
    model_config = ConfigDict(frozen=True)

    J0: float = Field(ge=0)
    J1: float = Field(ge=0)
    J2: float = Field(ge=0)

    @property
    def identity_residual(self) -> float:
        return abs(self.J0 - (self.J1 - self.J2))


class ExtremalSolution(BaseModel):
    """Solved extremal problem over its finite support (arrays are aligned row by row)"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    A: float = Field(gt=0)
    z0_squared: float = Field(gt=0)
    indices: np.ndarray
    multiplicity: int = Field(ge=1)
    b: np.ndarray
    a_squared: np.ndarray
    theta_squared: np.ndarray
    j: JTriple
    r: float = Field(gt=0)
    u: float = Field(ge=0)
    epsilon: float = Field(gt=0)
    ellipsoid_radius: float = Field(default=1.0, gt=0)

    @property
    def support_size(self) -> int:
        return int(self.indices.shape[0])

    @property
    def radius_residual(self) -> float:
        total = self.multiplicity * float(np.sum(self.theta_squared))
        return abs(total - self.r ** 2) / self.r ** 2

    @property
    def ellipsoid_residual(self) -> float:
        total = self.multiplicity * float(np.sum(self.a_squared * self.theta_squared))
        return abs(total - self.ellipsoid_radius ** 2) / self.ellipsoid_radius ** 2

    def to_record(self) -> Dict[str, float]:
        return {
            "A": self.A,
            "z0_squared": self.z0_squared,
            "u": self.u,
            "r": self.r,
            "epsilon": self.epsilon,
            "ellipsoid_radius": self.ellipsoid_radius,
            "J0": self.j.J0,
            "J1": self.j.J1,
            "J2": self.j.J2,
            "support_size": self.support_size,
            "multiplicity": self.multiplicity,
            "radius_residual": self.radius_residual,
            "ellipsoid_residual": self.ellipsoid_residual,
        }


# Detection models
class FilterWeights(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    indices: np.ndarray
    weights: np.ndarray
    normalization: float = Field(gt=0)
    multiplicity: int = Field(ge=1)

    def as_mapping(self) -> Dict[Tuple[int, ...], float]:
        return {tuple(int(c) for c in row): float(w) for row, w in zip(self.indices, self.weights)}


class TestOutcome(BaseModel):
    __test__ = False
    model_config = ConfigDict(frozen=True)

    statistic: float
    threshold: float
    reject: bool

    @model_validator(mode="after")
    def _decision_matches(self):
        if self.reject != (self.statistic > self.threshold):
            raise ValueError("reject must equal statistic > threshold")
        return self


# Monte Carlo models
class ExperimentPlan(BaseModel):
    """Either `radius` or `target_u` fixes the alternative"""

    model_config = ConfigDict(frozen=True)

    config: ProblemConfig
    radius: Optional[float] = Field(default=None, gt=0)
    target_u: Optional[float] = Field(default=None, gt=0)
    replications: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2 ** 64)
    threshold_rule: ThresholdRule = "quantile_alpha"
    consistency_c: Optional[float] = None

    @model_validator(mode="after")
    def _alternative_and_rule(self):
        if (self.radius is None) == (self.target_u is None):
            raise ValueError("exactly one of radius or target_u must be given")
        if self.threshold_rule == "consistency_cu":
            if self.consistency_c is None or not 0 < self.consistency_c < 1:
                raise ValueError("consistency_c must lie in (0,1) for consistency_cu")
        return self


class ErrorEstimates(BaseModel):
    alpha: float
    radius: float
    u_value: float
    threshold: float
    replications: int
    seed: int
    type1_rate: float = Field(ge=0, le=1)
    type2_rate: float = Field(ge=0, le=1)
    type1_se: Optional[float] = Field(default=None, ge=0)
    type2_se: Optional[float] = Field(default=None, ge=0)
    predicted_type2: float
    null_mean: float
    null_variance: float
    alternative_mean: float
    alternative_variance: float
    support_size: int


# Asymptotics models
class RateRegime(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: RegimeKind
    degrees: Tuple[float, ...]
    exponents: Tuple[float, ...]

    @model_validator(mode="after")
    def _lengths(self):
        if len(self.degrees) != len(self.exponents) or len(self.degrees) == 0:
            raise ValueError("degrees and exponents must have the same nonzero length")
        return self

    @property
    def dimension(self) -> int:
        return len(self.degrees)


class RatePrediction(BaseModel):
    regime: RateRegime
    epsilon: float
    r_star: float
    exponent_or_log_power: float
    scale: RateScale
    log_constant: Optional[float] = None
    detectability_cutoff: Optional[float] = None
    detectable: Optional[bool] = None


class LemmaCheck(BaseModel):
    quantity: str
    exact: float
    asymptotic: float
    ratio: float

    @property
    def residual(self) -> float:
        return abs(self.exact - self.asymptotic)


class SobolevConstants(BaseModel):
    C0: float
    C1: float
    C2: float
    P: float
    oracle: Dict[str, float] = {}
    residuals: Dict[str, float] = {}


class RateFit(BaseModel):
    regime: RateRegime
    scale: RateScale
    slope: float
    intercept: float
    predicted: float
    target_u: float
    epsilons: List[float]
    radii: List[float]

    @property
    def relative_error(self) -> float:
        return abs(self.slope - self.predicted) / abs(self.predicted)


# CLI models
class CommandSpec(BaseModel):
    subcommand: Literal["solve", "rates", "simulate", "verify"]
    config_path: Optional[str] = None
    output_path: Optional[str] = None
    overrides: Dict[str, str] = {}
    seed: Optional[int] = None


class Provenance(BaseModel):
    config_hash: str
    seed: Optional[int] = None
    library_version: str
    multiplicity_convention: str
    summation: str = "fsum"
    partitions: int = 1


# Problem file (YAML) sections
class ProblemSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dimension: int
    epsilon: float
    alpha: float = 0.05
    orthant_multiplicity: int = 1
    support_cap: int = SUPPORT_CAP


class ExperimentSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    radius: Optional[float] = None
    target_u: Optional[float] = None
    replications: int = 10_000
    seed: int = 0
    threshold_rule: ThresholdRule = "quantile_alpha"
    consistency_c: Optional[float] = None


class ProblemFile(BaseModel):
    """Contents of a problem configuration file"""

    model_config = ConfigDict(extra="forbid")

    problem: ProblemSection
    spectrum: SpectrumSpec
    smoothness: SmoothnessSpec
    experiment: ExperimentSection = ExperimentSection()

    def problem_payload(self) -> Dict:
        return {
            **self.problem.model_dump(),
            "spectrum": self.spectrum.model_dump(),
            "smoothness": self.smoothness.model_dump(),
        }
