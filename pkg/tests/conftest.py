import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from phendo.models import IncoherentModel, MobiusCircleMap, PerturbedLinearModel
from phendo.semiconjugacy import SemiconjugacyApprox

settings.register_profile("phendo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("phendo")

CAT = [[3, 1], [1, 1]]


@pytest.fixture(scope="session")
def psi():
    return MobiusCircleMap(0.6)


@pytest.fixture(scope="session")
def incoherent():
    return IncoherentModel()


@pytest.fixture(scope="session")
def linear():
    return PerturbedLinearModel(CAT, 0.0)


@pytest.fixture(scope="session")
def perturbed():
    return PerturbedLinearModel(CAT, 0.05)


@pytest.fixture(scope="session")
def approx(perturbed):
    return SemiconjugacyApprox(perturbed, 30)


@pytest.fixture(scope="session")
def approx_linear(linear):
    return SemiconjugacyApprox(linear, 30)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
