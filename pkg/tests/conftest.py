import numpy as np
import pytest

from prandtl import OmegaGrid


@pytest.fixture(scope="session")
def grid():
    return OmegaGrid()


@pytest.fixture(scope="session")
def small_grid():
    return OmegaGrid(512, 12.0)


def sqrt1mx2(x):
    return np.sqrt((1.0 - x) * (1.0 + x))
