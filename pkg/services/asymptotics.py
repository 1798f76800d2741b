"""
Closed-form separation rates, lattice-sum asymptotics and the constants
behind them, each paired with a brute-force or quadrature check.

Indices c_j = (1 + 4 t_j) / s_j order the coordinates of tensor regimes;
coordinate 1 is always the dominant one.
"""
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from config import QUADRATURE_EPSABS, QUADRATURE_EPSREL, SUPPORT_CAP
from errors import DomainError
from models import (
    LemmaCheck,
    ProblemConfig,
    RateFit,
    RatePrediction,
    RateRegime,
    SobolevConstants,
)
from services.extremal_solver import compute_J, solve_extremal, solve_for_u
from services.lattice import enumerate_downset, power_product_ball
from services.sequence_model import validate_config, with_epsilon

logger = logging.getLogger(__name__)

_REGIMES = {
    ("mildly_ill_posed", "tensor_polynomial"): "tensor_mild_ordinary",
    ("mildly_ill_posed", "tensor_exponential"): "tensor_mild_supersmooth",
    ("severely_ill_posed", "tensor_exponential"): "tensor_severe_supersmooth",
    ("severely_ill_posed", "tensor_polynomial"): "tensor_severe_ordinary",
    ("mildly_ill_posed", "sobolev_sum"): "sobolev_mild",
    ("severely_ill_posed", "sobolev_sum_power"): "sobolev_severe",
}


# Special functions
def zeta(x: float) -> float:
    """Riemann zeta for real x > 1"""
    if not x > 1:
        raise DomainError(f"zeta needs x > 1, got {x}")
    return float(special.zeta(x))


def gamma_fn(x: float) -> float:
    if not x > 0:
        raise DomainError(f"gamma_fn needs x > 0, got {x}")
    return float(special.gamma(x))


# Regimes and rates
def tensor_indices(degrees: Sequence[float], exponents: Sequence[float]) -> np.ndarray:
    """c_j = (1 + 4 t_j) / s_j"""
    t = np.asarray(degrees, dtype=float)
    s = np.asarray(exponents, dtype=float)
    return (1.0 + 4.0 * t) / s


def _require_decreasing(values: np.ndarray, name: str) -> None:
    for j in range(1, len(values)):
        if not values[j - 1] > values[j]:
            raise DomainError(
                f"{name}_{j} > {name}_{j + 1} required",
                f"got {name}_{j}={values[j - 1]:.6g}, {name}_{j + 1}={values[j]:.6g}",
            )


def _require_dominant(values: np.ndarray, name: str) -> None:
    for j in range(1, len(values)):
        if not values[0] > values[j]:
            raise DomainError(
                f"{name}_1 > {name}_{j + 1} required",
                f"got {name}_1={values[0]:.6g}, {name}_{j + 1}={values[j]:.6g}",
            )


def _require_common(exponents: Sequence[float]) -> float:
    if len(set(exponents)) > 1:
        raise DomainError("common smoothness exponent s_j = s required", f"got s={tuple(exponents)}")
    return float(exponents[0])


def check_regime(regime: RateRegime) -> None:
    """Raise DomainError naming the first ordering the regime parameters violate"""
    t = np.asarray(regime.degrees, dtype=float)
    s = np.asarray(regime.exponents, dtype=float)
    kind = regime.kind
    if kind == "tensor_mild_ordinary":
        _require_decreasing(tensor_indices(t, s), "c")
    elif kind == "tensor_mild_supersmooth":
        _require_common(regime.exponents)
    elif kind == "tensor_severe_supersmooth":
        _require_dominant(t / s, "t/s")
    elif kind == "tensor_severe_ordinary":
        _require_common(regime.exponents)
        _require_dominant(t, "t")
    elif kind == "sobolev_severe":
        _require_common(regime.exponents)
        _require_dominant(t, "t")


def regime_for(config: ProblemConfig) -> RateRegime:
    """Rate regime of a problem, from its spectrum kind and smoothness shape"""
    key = (config.spectrum.kind, config.smoothness.shape)
    if key not in _REGIMES:
        raise DomainError(
            "no closed-form rate for this combination",
            f"spectrum={key[0]}, smoothness={key[1]}",
        )
    regime = RateRegime(
        kind=_REGIMES[key],
        degrees=config.spectrum.degrees,
        exponents=config.smoothness.exponents,
    )
    check_regime(regime)
    return regime


def _log_inverse(epsilon: float) -> float:
    if not 0 < epsilon < 1:
        raise DomainError(f"logarithmic rates need epsilon in (0,1), got {epsilon}")
    return math.log(1.0 / epsilon)


def separation_rate(
    regime: RateRegime, epsilon: float, log_constant: Optional[float] = None
) -> RatePrediction:
    """
    Minimax separation rate r* of `regime` at noise level `epsilon`.

    For sobolev_severe the rate is (C log(1/eps))^{-s}; `log_constant` is C
    and defaults to the detectability cutoff 1/t_1.  Detection is possible
    exactly when C < 1/t_1.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    check_regime(regime)
    t = np.asarray(regime.degrees, dtype=float)
    s = np.asarray(regime.exponents, dtype=float)
    kind = regime.kind
    extra = {}

    if kind == "tensor_mild_ordinary":
        exponent = 4.0 / (4.0 + tensor_indices(t, s)[0])
        r_star, scale = epsilon ** exponent, "power"
    elif kind == "tensor_mild_supersmooth":
        exponent = float(np.sum(t + 0.25))
        r_star, scale = epsilon * _log_inverse(epsilon) ** exponent, "parametric_log"
    elif kind == "tensor_severe_supersmooth":
        exponent = s[0] / (s[0] + t[0])
        r_star, scale = epsilon ** exponent, "power"
    elif kind == "tensor_severe_ordinary":
        exponent = -2.0 * s[0]
        level = 4.0 * _log_inverse(epsilon) / (4.0 * t[0])
        r_star, scale = level ** exponent, "log"
    elif kind == "sobolev_mild":
        exponent = 4.0 / (4.0 + float(np.sum((1.0 + 4.0 * t) / s)))
        r_star, scale = epsilon ** exponent, "power"
    else:
        cutoff = 1.0 / t[0]
        constant = cutoff if log_constant is None else log_constant
        if not constant > 0:
            raise DomainError(f"log_constant must be > 0, got {constant}")
        exponent = -s[0]
        r_star, scale = (constant * _log_inverse(epsilon)) ** exponent, "log"
        extra = {
            "log_constant": constant,
            "detectability_cutoff": cutoff,
            "detectable": bool(constant < cutoff),
        }

    return RatePrediction(
        regime=regime,
        epsilon=epsilon,
        r_star=float(r_star),
        exponent_or_log_power=float(exponent),
        scale=scale,
        **extra,
    )


def _regression_axes(scale: str, epsilons: np.ndarray, radii: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if scale == "power":
        return np.log(epsilons), np.log(radii)
    if np.any(epsilons >= 1):
        raise DomainError("logarithmic scales need every epsilon in (0,1)")
    loglog = np.log(np.log(1.0 / epsilons))
    if scale == "parametric_log":
        return loglog, np.log(radii / epsilons)
    return loglog, np.log(radii)


def fit_rate_exponent(
    config: ProblemConfig, epsilons: Sequence[float], target_u: float = 1.0
) -> RateFit:
    """
    Solve u_eps(r) = target_u along `epsilons` and regress the radii on the
    regime's natural scale; the slope estimates the rate exponent or log power.
    """
    if len(epsilons) < 2:
        raise DomainError("a rate fit needs at least two noise levels")
    regime = regime_for(config)
    eps = np.asarray(sorted(epsilons, reverse=True), dtype=float)
    radii = np.array([solve_for_u(with_epsilon(config, float(e)), target_u).r for e in eps])
    prediction = separation_rate(regime, float(eps[-1]))
    x, y = _regression_axes(prediction.scale, eps, radii)
    slope, intercept = np.polyfit(x, y, 1)
    logger.info("%s: fitted slope %.6g, predicted %.6g", regime.kind, slope, prediction.exponent_or_log_power)
    return RateFit(
        regime=regime,
        scale=prediction.scale,
        slope=float(slope),
        intercept=float(intercept),
        predicted=prediction.exponent_or_log_power,
        target_u=target_u,
        epsilons=eps.tolist(),
        radii=radii.tolist(),
    )


def log_rate_path(
    config: ProblemConfig, log_constant: float, epsilons: Sequence[float]
) -> List[Tuple[float, float, float]]:
    """(eps, r, u_eps(r)) along r = (C log(1/eps))^{-s} for a sobolev_severe problem"""
    regime = regime_for(config)
    if regime.kind != "sobolev_severe":
        raise DomainError("log_rate_path needs a sobolev_severe problem", f"got {regime.kind}")
    path = []
    for e in epsilons:
        r = separation_rate(regime, e, log_constant=log_constant).r_star
        solution = solve_extremal(with_epsilon(config, e), r)
        path.append((float(e), r, solution.u))
    return path


# Lattice sums
def lattice_power_sum(
    u: Sequence[float], s: Sequence[float], R: float, cap: int = SUPPORT_CAP
) -> float:
    """sum of prod l_j^{u_j} over {prod (l_j / R)^{s_j} <= 1}"""
    if len(u) != len(s) or len(s) == 0:
        raise DomainError("u and s must have the same nonzero length")
    if not R > 0:
        raise DomainError(f"R must be > 0, got {R}")
    if any(v <= 0 for v in s):
        raise DomainError("exponents s_j must be > 0")
    points = enumerate_downset(len(s), power_product_ball(s, R), cap)
    terms = np.prod(points.astype(float) ** np.asarray(u, dtype=float), axis=1)
    return math.fsum(terms.tolist())


def verify_lemma1(
    u: Sequence[float], s: Sequence[float], R: float, cap: int = SUPPORT_CAP
) -> LemmaCheck:
    """Brute-force lattice power sum against R^{sbar c_1} / (1 + u_1) prod zeta(c_1 s_j - u_j)"""
    u_arr = np.asarray(u, dtype=float)
    s_arr = np.asarray(s, dtype=float)
    c = (1.0 + u_arr) / s_arr
    _require_decreasing(c, "c")
    zeta_args = c[0] * s_arr[1:] - u_arr[1:]
    if np.any(zeta_args <= 1):
        raise DomainError("c_1 s_j - u_j > 1 required for j >= 2", f"got {zeta_args.tolist()}")

    exact = lattice_power_sum(u, s, R, cap)
    asymptotic = R ** (s_arr.sum() * c[0]) / (1.0 + u_arr[0])
    asymptotic *= math.prod(zeta(float(x)) for x in zeta_args)
    return LemmaCheck(quantity="S", exact=exact, asymptotic=asymptotic, ratio=exact / asymptotic)


def j_lemma_constants(t: Sequence[float], s: Sequence[float]) -> Dict[str, float]:
    """Leading constants of J0, J1, J2 divided by 2^d R^{sbar c_1}"""
    t_arr = np.asarray(t, dtype=float)
    s_arr = np.asarray(s, dtype=float)
    c = tensor_indices(t_arr, s_arr)
    _require_decreasing(c, "c")
    tail = math.prod(zeta(float(x)) for x in c[0] * s_arr[1:] - 4.0 * t_arr[1:])
    p, q = 1.0 + 4.0 * t_arr[0], s_arr[0]
    return {
        "J0": 8.0 * q * q / (p * (p + 2 * q) * (p + 4 * q)) * tail,
        "J1": 2.0 * q / (p * (p + 2 * q)) * tail,
        "J2": 2.0 * q / ((p + 2 * q) * (p + 4 * q)) * tail,
    }


def _tensor_config(t: Sequence[float], s: Sequence[float], multiplicity: int, cap: int) -> ProblemConfig:
    return validate_config(
        {
            "dimension": len(t),
            "spectrum": {"kind": "mildly_ill_posed", "degrees": list(t)},
            "smoothness": {"shape": "tensor_polynomial", "exponents": list(s)},
            "epsilon": 1.0,
            "orthant_multiplicity": multiplicity,
            "support_cap": cap,
        }
    )


def verify_J_lemmas(
    t: Sequence[float], s: Sequence[float], R: float, cap: int = SUPPORT_CAP
) -> List[LemmaCheck]:
    """Exact J1, J2, J0 at A = R^{-2 sbar} (multiplicity 2^d) against their leading terms"""
    if len(t) != len(s) or len(t) == 0:
        raise DomainError("t and s must have the same nonzero length")
    if not R > 0:
        raise DomainError(f"R must be > 0, got {R}")
    constants = j_lemma_constants(t, s)
    d = len(t)
    s_bar = float(np.sum(s))
    c1 = float(tensor_indices(t, s)[0])
    config = _tensor_config(t, s, 2 ** d, cap)
    exact = compute_J(config, R ** (-2.0 * s_bar))
    scale = 2 ** d * R ** (s_bar * c1)

    checks = []
    for name, value in (("J1", exact.J1), ("J2", exact.J2), ("J0", exact.J0)):
        asymptotic = scale * constants[name]
        checks.append(LemmaCheck(quantity=name, exact=value, asymptotic=asymptotic, ratio=value / asymptotic))
    return checks


# Sobolev-type constants
def _liouville_parameters(t: Sequence[float], s: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, float]:
    t_arr = np.asarray(t, dtype=float)
    s_arr = np.asarray(s, dtype=float)
    if len(t_arr) != len(s_arr) or len(t_arr) == 0:
        raise DomainError("t and s must have the same nonzero length")
    if np.any(t_arr < 0) or np.any(s_arr <= 0):
        raise DomainError("need t_j >= 0 and s_j > 0")
    return t_arr, s_arr, float(np.sum((1.0 + 4.0 * t_arr) / (2.0 * s_arr)))


def _quadrature_oracle(t: np.ndarray, s: np.ndarray) -> Dict[str, float]:
    d = len(t)

    def bounds(k: int):
        def limits(*outer):
            rest = 1.0 - sum(x ** (2.0 * s[k + 1 + i]) for i, x in enumerate(outer[: d - k - 1]))
            return (0.0, max(rest, 0.0) ** (1.0 / (2.0 * s[k])))

        return limits

    def integrand(power: int, *x):
        v = sum(xj ** (2.0 * sj) for xj, sj in zip(x, s))
        weight = math.prod(xj ** (4.0 * tj) for xj, tj in zip(x, t))
        if power == 0:
            return weight * (1.0 - v) ** 2
        if power == 1:
            return weight * (1.0 - v)
        return weight * v * (1.0 - v)

    opts = {"epsabs": QUADRATURE_EPSABS, "epsrel": QUADRATURE_EPSREL, "limit": 200}
    values = {}
    for name, power in (("C0", 0), ("C1", 1), ("C2", 2)):
        value, _ = integrate.nquad(
            lambda *x, p=power: integrand(p, *x),
            [bounds(k) for k in range(d)],
            opts=[opts] * d,
        )
        values[name] = 2 ** d * value
    return values


def sobolev_constants(t: Sequence[float], s: Sequence[float], oracle: bool = True) -> SobolevConstants:
    """
    Constants of the Sobolev-type J sums via Liouville's formula:

        K  = prod Gamma(p_j) / (prod s_j Gamma(P)),  p_j = (1 + 4 t_j) / (2 s_j),  P = sum p_j
        C1 = K / (P (P+1)),  C2 = K / ((P+1)(P+2)),  C0 = 2 K / (P (P+1) (P+2))

    With `oracle` the defining integrals over {sum x_j^{2 s_j} <= 1} are also
    evaluated by quadrature and the absolute residuals reported.
    """
    t_arr, s_arr, P = _liouville_parameters(t, s)
    p = (1.0 + 4.0 * t_arr) / (2.0 * s_arr)
    K = math.exp(float(np.sum(special.gammaln(p))) - float(special.gammaln(P))) / math.prod(s_arr.tolist())
    constants = {
        "C0": 2.0 * K / (P * (P + 1.0) * (P + 2.0)),
        "C1": K / (P * (P + 1.0)),
        "C2": K / ((P + 1.0) * (P + 2.0)),
    }
    oracle_values: Dict[str, float] = {}
    residuals: Dict[str, float] = {}
    if oracle:
        oracle_values = _quadrature_oracle(t_arr, s_arr)
        residuals = {name: abs(oracle_values[name] - constants[name]) for name in constants}
    return SobolevConstants(P=P, oracle=oracle_values, residuals=residuals, **constants)


def sharp_constant(config: ProblemConfig) -> Tuple[float, float]:
    """
    (C, q) with u_eps^2 ~ C eps^-4 r^q as r -> 0, for the two regimes with
    sharp asymptotics (tensor_mild_ordinary and sobolev_mild).
    """
    regime = regime_for(config)
    t, s = config.spectrum.degrees, config.smoothness.exponents
    d, m = config.dimension, config.orthant_multiplicity
    if regime.kind == "tensor_mild_ordinary":
        D = {name: m * value for name, value in j_lemma_constants(t, s).items()}
        c1 = float(tensor_indices(t, s)[0])
        C = D["J0"] / (2.0 * D["J1"] ** 2) * (D["J2"] / D["J1"]) ** (c1 / 2.0)
        return C, 4.0 + c1
    if regime.kind == "sobolev_mild":
        k = sobolev_constants(t, s, oracle=False)
        C = (2 ** d / m) * k.C0 / (2.0 * k.C1 ** 2) * (k.C2 / k.C1) ** k.P
        return C, 4.0 + 2.0 * k.P
    raise DomainError("no sharp constant for this regime", f"got {regime.kind}")
