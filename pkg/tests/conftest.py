import numpy as np
import pytest

SEED = 20260810  # recorded seed for every randomized check


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)
