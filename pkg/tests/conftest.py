import numpy as np
import pytest

from sobflow import get_preset


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture(scope="session")
def ex1():
    return get_preset("paper-ex1")


@pytest.fixture(scope="session")
def liesen():
    return get_preset("paper-liesen")
