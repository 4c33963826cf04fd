import numpy as np
import pytest
from hypothesis import settings

from rdcba import berger_bifurcation, binary_hamming, gaussian_instance, laplacian_instance

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def binary():
    return binary_hamming(0.5)


@pytest.fixture(scope="session")
def berger():
    return berger_bifurcation()


@pytest.fixture(scope="session")
def gaussian():
    return gaussian_instance()


@pytest.fixture(scope="session")
def laplacian():
    return laplacian_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from .acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
