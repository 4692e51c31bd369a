import numpy as np
import pytest

from grasschur import AlgebraContext


@pytest.fixture
def ctx():
    return AlgebraContext(generators=8)


@pytest.fixture
def ctx4():
    return AlgebraContext(generators=4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
