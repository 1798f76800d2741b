import copy
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml
from pydantic import BaseModel, ValidationError

from errors import ConfigNotFoundError, InvalidConfigError
from models import ExperimentPlan, ProblemConfig, ProblemFile
from services.sequence_model import describe_validation, validate_config

logger = logging.getLogger(__name__)


def _known_keys(model: type, prefix: str = "") -> set:
    keys = set()
    for name, field in model.model_fields.items():
        path = f"{prefix}{name}"
        keys.add(path)
        annotation = field.annotation
        if isinstance(annotation, type) and issubclass(annotation, BaseModel):
            keys |= _known_keys(annotation, prefix=f"{path}.")
    return keys


def parse_overrides(pairs: Optional[list]) -> Dict[str, str]:
    """Turn ["problem.epsilon=0.05", ...] into a mapping"""
    overrides = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise InvalidConfigError(f"override must look like section.key=value, got {pair!r}")
        overrides[key.strip()] = value.strip()
    return overrides


def apply_overrides(raw: Dict[str, Any], overrides: Mapping[str, str]) -> Dict[str, Any]:
    """Set dotted keys in a copy of `raw`; values are parsed as YAML scalars"""
    known = _known_keys(ProblemFile)
    updated = copy.deepcopy(raw)
    for key, text in overrides.items():
        if key not in known or "." not in key:
            raise InvalidConfigError(f"unknown config key {key!r}")
        *sections, leaf = key.split(".")
        node = updated
        for section in sections:
            node = node.setdefault(section, {})
            if not isinstance(node, dict):
                raise InvalidConfigError(f"config key {section!r} is not a section")
        node[leaf] = yaml.safe_load(text)
        logger.debug("override %s=%r", key, node[leaf])
    return updated


def load_problem_file(path: Path, overrides: Optional[Mapping[str, str]] = None) -> ProblemFile:
    """Read a YAML problem file, apply dotted overrides and validate it"""
    path = Path(path)
    if not path.is_file():
        raise ConfigNotFoundError(f"config file not found: {path}")
    with open(path, "r") as f:
        try:
            raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as exc:
            raise InvalidConfigError(f"cannot parse {path}", str(exc).replace("\n", " ")) from None
    if not isinstance(raw, dict):
        raise InvalidConfigError(f"{path} must hold a mapping of sections")
    raw = apply_overrides(raw, overrides or {})
    try:
        problem_file = ProblemFile.model_validate(raw)
    except ValidationError as exc:
        raise InvalidConfigError(describe_validation(exc)) from None
    # cross-field checks (dimension agreement, alpha range)
    to_problem_config(problem_file)
    return problem_file


def to_problem_config(problem_file: ProblemFile) -> ProblemConfig:
    return validate_config(problem_file.problem_payload())


def to_experiment_plan(
    problem_file: ProblemFile,
    radius: Optional[float] = None,
    target_u: Optional[float] = None,
    replications: Optional[int] = None,
    seed: Optional[int] = None,
    threshold_rule: Optional[str] = None,
    consistency_c: Optional[float] = None,
) -> ExperimentPlan:
    """Experiment section of the file, with explicit arguments taking precedence"""
    section = problem_file.experiment
    if radius is None and target_u is None:
        radius, target_u = section.radius, section.target_u
    payload = {
        "config": to_problem_config(problem_file),
        "radius": radius,
        "target_u": target_u,
        "replications": section.replications if replications is None else replications,
        "seed": section.seed if seed is None else seed,
        "threshold_rule": threshold_rule or section.threshold_rule,
        "consistency_c": section.consistency_c if consistency_c is None else consistency_c,
    }
    try:
        return ExperimentPlan.model_validate(payload)
    except ValidationError as exc:
        raise InvalidConfigError(describe_validation(exc)) from None
