import sys

import numpy as np
import pytest

from gamow_decay.basis import build_family, coefficients, overlap_matrix
from gamow_decay.shell_model import initial_state_box_mode, make_model


@pytest.fixture(scope="session")
def model():
    return make_model(6.0, 1.0)


@pytest.fixture(scope="session")
def psi0(model):
    return initial_state_box_mode(model, 1)


@pytest.fixture(scope="session")
def family(model):
    return build_family(model, 50)


@pytest.fixture(scope="session")
def coeffs(family, psi0):
    return coefficients(family, psi0)


@pytest.fixture(scope="session")
def overlaps(family):
    return overlap_matrix(family)


@pytest.fixture(scope="session")
def lifetime(family):
    k1 = family.k[0]
    return 1.0 / (-4.0 * k1.real * k1.imag)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)



def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
