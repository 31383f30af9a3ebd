import warnings

import numpy as np
import pytest
from hypothesis import settings

from sqzopto.params import LowQualityFactorWarning
from sqzopto.pipeline import random_model

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def random_models():
    rng = np.random.default_rng(7)
    return [random_model(rng) for _ in range(100)]


@pytest.fixture(autouse=True)
def _quiet_low_q():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LowQualityFactorWarning)
        yield
