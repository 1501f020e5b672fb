import numpy as np
import pytest

from logvoronoi.model import MIXTURE_POINT, builtin


@pytest.fixture(scope="session")
def mixture():
    return builtin("mixture_binomial_5")


@pytest.fixture(scope="session")
def mixture_point():
    return np.array(MIXTURE_POINT)
