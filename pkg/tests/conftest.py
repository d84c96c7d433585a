import numpy as np
import pytest
from hypothesis import settings

from lpkit.filters import build_filter_pair
from lpkit.grid import make_grid

settings.register_profile("lpkit", max_examples=40, deadline=None)
settings.load_profile("lpkit")


@pytest.fixture
def spec1():
    return make_grid(1, 8, 1.0)


@pytest.fixture
def spec2():
    return make_grid(2, 5, 1.0)


@pytest.fixture(params=["bump", "cosine"])
def pair(request):
    return build_filter_pair(request.param)


@pytest.fixture
def bump_pair():
    return build_filter_pair("bump")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
