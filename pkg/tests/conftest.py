import math

import numpy as np
import pytest

from services.sequence_model import validate_config


def make_config(
    degrees,
    exponents,
    kind="mildly_ill_posed",
    shape="tensor_polynomial",
    epsilon=0.1,
    alpha=0.05,
    multiplicity=1,
    support_cap=None,
):
    payload = {
        "dimension": len(degrees),
        "spectrum": {"kind": kind, "degrees": list(degrees)},
        "smoothness": {"shape": shape, "exponents": list(exponents)},
        "epsilon": epsilon,
        "alpha": alpha,
        "orthant_multiplicity": multiplicity,
    }
    if support_cap is not None:
        payload["support_cap"] = support_cap
    return validate_config(payload)


WORKED_RADIUS = math.sqrt(13.0 / 28.0)


@pytest.fixture
def worked_config():
    """d=1, b_l = 1, a_l^2 = l^2, eps = 0.1"""
    return make_config([0.0], [1.0], shape="sobolev_sum", epsilon=0.1)


@pytest.fixture
def level_config():
    return make_config([1.0], [2.0], epsilon=0.05)


@pytest.fixture
def tiny_noise_config():
    return make_config([1.0], [2.0], epsilon=1e-10)


@pytest.fixture
def results_dir(tmp_path, monkeypatch):
    from services import results_store as store_module

    store = store_module.ResultsStore(tmp_path / "solutions", tmp_path / "experiments")
    monkeypatch.setattr(store_module, "results_store", store)
    for name in ("commands.solve", "commands.rates", "commands.simulate", "commands.verify", "commands.common"):
        module = __import__(name, fromlist=["results_store"])
        monkeypatch.setattr(module, "results_store", store)
    return tmp_path


SHAPES = ["tensor_polynomial", "tensor_exponential", "sobolev_sum", "sobolev_exponential_sum", "sobolev_sum_power"]


def random_configs(count, seed=20240611):
    """`count` random problems in d <= 2 with s_j in [1, 2], plus the generator for further draws"""
    rng = np.random.default_rng(seed)
    configs = []
    for _ in range(count):
        d = int(rng.integers(1, 3))
        shape = SHAPES[int(rng.integers(len(SHAPES)))]
        kind = "mildly_ill_posed" if rng.random() < 0.5 else "severely_ill_posed"
        if shape == "sobolev_sum_power":
            exponents = [float(rng.uniform(1.0, 2.0))] * d
        else:
            exponents = rng.uniform(1.0, 2.0, d).tolist()
        multiplicity = 1 if rng.random() < 0.5 else 2 ** d
        configs.append(
            make_config(rng.uniform(0.0, 1.0, d).tolist(), exponents, kind=kind, shape=shape, multiplicity=multiplicity)
        )
    return configs, rng
