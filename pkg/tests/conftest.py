import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("kreinkit", max_examples=60, deadline=None)
settings.load_profile("kreinkit")

SEED = 20240611


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def ginibre(rng, m, n=None):
    n = m if n is None else n
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)
