import numpy as np
import pytest

from netfactor.fixtures import ALTERNATE_CERTIFICATE, load_fixture

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def example_system():
    return load_fixture("two-channel")[0]


@pytest.fixture
def alternate_system():
    return load_fixture("two-channel-alternate")[0]


@pytest.fixture
def fullnoise_system():
    return load_fixture("two-channel-fullnoise")[0]


@pytest.fixture
def example_basis():
    return np.array(load_fixture("two-channel")[1]["phi_basis"])


@pytest.fixture
def alternate_certificate():
    return np.array(ALTERNATE_CERTIFICATE["s"]), np.array(ALTERNATE_CERTIFICATE["t"])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
