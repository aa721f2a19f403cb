import numpy as np
import pytest

from cgolab import make_conductivity, make_grid, parse_conductivity, schrodinger_potential

BUMP = "bumps: 0 0 0 0.1 0.45"
BUMP2 = "bumps: 0.3 0 0 0.08 0.42; -0.3 0 0 0.05 0.42"

# acceptance lines collected by tests/test_acceptance.py
VERDICTS = {}


@pytest.fixture(scope="session")
def grid16():
    return make_grid(3, 16, 2 * np.pi)


@pytest.fixture(scope="session")
def grid32():
    return make_grid(3, 32, 2 * np.pi)


@pytest.fixture(scope="session")
def grid64():
    return make_grid(3, 64, 2 * np.pi)


@pytest.fixture(scope="session")
def bump32(grid32):
    cond = make_conductivity(parse_conductivity(BUMP), grid32)
    return cond, schrodinger_potential(cond, tol=1e-3)


@pytest.fixture(scope="session")
def bump64(grid64):
    cond = make_conductivity(parse_conductivity(BUMP), grid64)
    return cond, schrodinger_potential(cond)


@pytest.fixture(scope="session")
def bump64_second(grid64):
    cond = make_conductivity(parse_conductivity(BUMP2), grid64)
    return cond, schrodinger_potential(cond)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[k])
