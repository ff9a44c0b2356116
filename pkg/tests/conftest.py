import sys

import numpy as np
import pytest

from ucrphase import make_species, Transition


@pytest.fixture
def yb():
    return make_species("Yb174")


@pytest.fixture
def yb_photon():
    return make_species("Yb174", Transition.SINGLE_PHOTON)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "SUMMARY", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
