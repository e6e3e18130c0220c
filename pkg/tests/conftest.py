import numpy as np
import pytest

from hypflow import FoliatedBundle, standard_genus2


@pytest.fixture(scope="session")
def group():
    return standard_genus2()


@pytest.fixture(scope="session")
def bundle(group):
    return FoliatedBundle(group, k=1)


@pytest.fixture(scope="session")
def bundle2(group):
    return FoliatedBundle(group, k=2)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
