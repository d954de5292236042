import json
import pathlib
import warnings

import numpy as np
import pytest

from halfline.errors import NearPoleWarning
from halfline.radial import default_grid

FIXTURES = pathlib.Path(__file__).with_name("fixtures")

# filled by test_acceptance; echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def cplx(pair):
    return complex(pair[0], pair[1])


@pytest.fixture(scope="session")
def oracles():
    return json.loads((FIXTURES / "oracles.json").read_text())


@pytest.fixture(scope="session")
def grid():
    return default_grid()


@pytest.fixture(autouse=True)
def _quiet_near_pole():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearPoleWarning)
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
