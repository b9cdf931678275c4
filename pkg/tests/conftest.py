import numpy as np
import pytest

from mwfpi.model import ModelParams, make_scales


@pytest.fixture(scope="session")
def params():
    """Reference cavity in SI units (calibrated barrier height)."""
    return ModelParams()


@pytest.fixture(scope="session")
def scales(params):
    return make_scales(params)


@pytest.fixture(scope="session")
def reduced(params, scales):
    """Dimensionless twin: hbar = sigma_b = V_b = 1."""
    return scales.reduce_params(params)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
